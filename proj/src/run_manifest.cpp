#include "atomcot/run_manifest.hpp"

#include <fstream>
#include <stdexcept>

namespace atomcot {

using nlohmann::json;

json config_to_json(const SearchConfig& c) {
  json j;
  j["strategy"] = to_string(c.strategy);
  j["n_candidates"] = c.n_candidates;
  j["beam_window"] = c.beam_window;
  j["aggregation"] = to_string(c.aggregation);
  j["max_steps"] = c.max_steps;
  j["max_length"] = c.max_length;
  j["jaccard_intra_threshold"] = c.jaccard_intra_threshold;
  j["jaccard_inter_threshold"] = c.jaccard_inter_threshold;
  j["temperature_start"] = c.temperature_start;
  j["temperature_increment"] = c.temperature_increment;
  j["temperature_cap"] = c.temperature_cap;
  j["max_retries"] = c.max_retries;
  j["seed"] = c.seed;
  j["parallelism"] = c.parallelism;
  return j;
}

SearchConfig config_from_json(const json& j) {
  SearchConfig c;
  if (j.contains("strategy")) {
    auto s = strategy_from_string(j.at("strategy").get<std::string>());
    if (!s) throw std::runtime_error("unknown strategy: " + j.at("strategy").get<std::string>());
    c.strategy = *s;
  }
  if (j.contains("aggregation")) {
    auto a = aggregation_from_string(j.at("aggregation").get<std::string>());
    if (!a) {
      throw std::runtime_error("unknown aggregation: " + j.at("aggregation").get<std::string>());
    }
    c.aggregation = *a;
  }
  c.n_candidates = j.value("n_candidates", c.n_candidates);
  c.beam_window = j.value("beam_window", c.beam_window);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.max_length = j.value("max_length", c.max_length);
  c.jaccard_intra_threshold = j.value("jaccard_intra_threshold", c.jaccard_intra_threshold);
  c.jaccard_inter_threshold = j.value("jaccard_inter_threshold", c.jaccard_inter_threshold);
  c.temperature_start = j.value("temperature_start", c.temperature_start);
  c.temperature_increment = j.value("temperature_increment", c.temperature_increment);
  c.temperature_cap = j.value("temperature_cap", c.temperature_cap);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.seed = j.value("seed", c.seed);
  c.parallelism = j.value("parallelism", c.parallelism);
  return c;
}

json to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["policy_backend"] = m.policy_backend;
  j["reward_backend"] = m.reward_backend;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["duration_ms"] = m.duration_ms;
  j["policy_calls"] = m.policy_calls;
  j["reward_calls"] = m.reward_calls;
  j["gen_units"] = m.gen_units;
  if (m.accuracy) j["accuracy"] = *m.accuracy;
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config");
  m.seed = j.at("seed").get<uint64_t>();
  m.policy_backend = j.value("policy_backend", "");
  m.reward_backend = j.value("reward_backend", "");
  m.inputs = j.value("inputs", std::vector<std::string>{});
  m.outputs = j.value("outputs", std::vector<std::string>{});
  m.duration_ms = j.value("duration_ms", 0.0);
  m.policy_calls = j.value("policy_calls", 0LL);
  m.reward_calls = j.value("reward_calls", 0LL);
  m.gen_units = j.value("gen_units", 0LL);
  if (j.contains("accuracy")) m.accuracy = j.at("accuracy").get<double>();
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_json(m).dump(2) << "\n";
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  in >> j;
  return manifest_from_json(j);
}

}  // namespace atomcot
