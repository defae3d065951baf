#pragma once

/**
 * Batch entry points behind the CLI subcommands. Each command writes its
 * output files plus exactly one manifest.json into the output directory and
 * returns a process exit code (0 ok, 2 config error, 1 runtime failure).
 * All randomness flows from the single config seed, so re-running a command
 * with the mock backend reproduces the data outputs byte for byte.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "atomcot/core_types.hpp"
#include "atomcot/data_engine.hpp"

namespace atomcot::cli {

struct BackendOptions {
  std::string kind = "mock";  // mock | http
  std::string tasks_path;     // mock: synthetic-task JSONL from simenv-gen
  double policy_correct_bias = 0.6;
  double reward_noise_sigma = 0.0;
  std::string base_url;  // http
  std::string model = "default";
  std::string template_dir;  // optional prompt overlay directory
};

struct SimenvGenOptions {
  int count = 10;
  int branching = 2;
  int depth = 3;
  uint64_t seed = 0;
  std::string out_dir;
};

struct InferOptions {
  BackendOptions backend;
  std::string questions_path;  // http mode input
  SearchConfig config;
  std::string out_dir;
};

struct PipelineOptions {
  std::string stage;  // generate | augment | difficulty | filter | sft
  BackendOptions backend;
  std::string questions_path;
  std::string chains_path;
  std::string difficulty_path;
  std::string reviews_path;
  int n_samples = 10;
  data::FilterPolicy filter;
  SearchConfig config;
  std::string out_dir;
};

struct EvalOptions {
  std::string mode;  // distribution | utilization | scores | scaling
  BackendOptions backend;
  std::string chains_path;
  std::string records_path;  // scores mode: utilization records JSONL
  std::string taxonomy_path;
  std::vector<std::string> manifest_paths;  // scaling mode
  int rollouts = 8;
  std::vector<int> prefix_lengths;  // utilization mode; empty = 1..depth-1
  SearchConfig config;
  std::string out_dir;
};

int cmd_simenv_gen(const SimenvGenOptions& opts);
int cmd_infer(const InferOptions& opts);
int cmd_pipeline(const PipelineOptions& opts);
int cmd_eval(const EvalOptions& opts);

}  // namespace atomcot::cli
