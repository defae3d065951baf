#pragma once

/**
 * JSONL record schemas for the core domain types.
 *
 * Serialization is canonical: object keys come out in a fixed (alphabetical)
 * order and numbers use the shortest round-tripping form, so for any record
 * emitted by this module, serialize(parse(line)) == line byte for byte.
 * Disengaged optional fields are omitted rather than written as null.
 *
 * Parsing validates record invariants and throws std::runtime_error with a
 * descriptive message; the file readers wrap that into JsonlError carrying
 * the path and 1-based line number.
 */

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomcot/core_types.hpp"

namespace atomcot {

nlohmann::json to_json(const Question& q);
nlohmann::json to_json(const AtomicStep& s);
nlohmann::json to_json(const ReasoningChain& c);
nlohmann::json to_json(const StepScore& s);

Question question_from_json(const nlohmann::json& j);
AtomicStep step_from_json(const nlohmann::json& j);
ReasoningChain chain_from_json(const nlohmann::json& j);
StepScore step_score_from_json(const nlohmann::json& j);

template <typename T>
std::string to_jsonl_line(const T& value) {
  return to_json(value).dump();
}

class JsonlError : public std::runtime_error {
 public:
  JsonlError(const std::string& path, size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        path_(path),
        line_(line) {}

  const std::string& path() const { return path_; }
  size_t line() const { return line_; }

 private:
  std::string path_;
  size_t line_;
};

/// Reads one record per nonempty line; ParseFn maps nlohmann::json -> T.
template <typename ParseFn>
auto read_jsonl(const std::filesystem::path& path, ParseFn parse)
    -> std::vector<decltype(parse(nlohmann::json{}))> {
  std::ifstream in(path);
  if (!in) {
    throw JsonlError(path.string(), 0, "cannot open file");
  }
  std::vector<decltype(parse(nlohmann::json{}))> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw JsonlError(path.string(), lineno, e.what());
    }
  }
  return out;
}

template <typename Range, typename DumpFn>
void write_jsonl(const std::filesystem::path& path, const Range& records, DumpFn dump) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  for (const auto& r : records) {
    out << dump(r).dump() << '\n';
  }
}

}  // namespace atomcot
