#pragma once

/**
 * Prompt templates, keyed by id. Built-in defaults cover the step generator,
 * the reward scorer, the data-engine prompts (dynamic long-CoT, short-CoT
 * augmentation, review filtering, quality scoring) and the ability
 * clusterer. A directory of <id>.txt files overlays the defaults, so every
 * prompt stays editable without a rebuild.
 *
 * Rendering substitutes {name} placeholders from the variable map; unknown
 * placeholders are left verbatim.
 */

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace atomcot {

class TemplateStore {
 public:
  static TemplateStore builtin();
  static TemplateStore from_dir(const std::filesystem::path& dir);

  bool has(const std::string& id) const { return templates_.count(id) > 0; }
  const std::string& raw(const std::string& id) const;
  std::string render(const std::string& id,
                     const std::map<std::string, std::string>& vars) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, std::string> templates_;
};

}  // namespace atomcot
