#pragma once

/**
 * One manifest per command run: the config snapshot, root seed, backend
 * identities, input/output paths, wall-clock duration and the instrumented
 * call counters. Everything a table in a report needs to be regenerated.
 */

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomcot/core_types.hpp"

namespace atomcot {

struct RunManifest {
  std::string command;
  nlohmann::json config;  // SearchConfig snapshot plus command extras
  uint64_t seed = 0;
  std::string policy_backend;  // backend identity strings; empty when unused
  std::string reward_backend;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double duration_ms = 0.0;
  long long policy_calls = 0;
  long long reward_calls = 0;
  long long gen_units = 0;
  std::optional<double> accuracy;  // set when gold answers were available
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest load_manifest(const std::filesystem::path& path);

nlohmann::json config_to_json(const SearchConfig& c);
SearchConfig config_from_json(const nlohmann::json& j);

}  // namespace atomcot
