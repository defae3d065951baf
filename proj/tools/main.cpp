// atomcot command-line tool: synthetic-environment generation, batch
// inference and search, the dataset pipeline stages, and evaluation reports.

#include <cstdio>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "atomcot/commands.hpp"
#include "atomcot/run_manifest.hpp"

namespace {

using atomcot::SearchConfig;

struct ConfigCli {
  std::string config_path;
  std::string strategy;
  std::string aggregation;
  int n_candidates = -1;
  int beam_window = -1;
  int max_steps = -1;
  uint64_t seed = 0;
  bool seed_set = false;
  int parallelism = -1;
  double temperature_start = -1.0;
};

void add_config_flags(CLI::App* app, ConfigCli& cli) {
  app->add_option("--config", cli.config_path, "JSON config file with SearchConfig fields");
  app->add_option("--strategy", cli.strategy, "quick|vote|bon|greedy|beam");
  app->add_option("--aggregation", cli.aggregation, "min|last|avg");
  app->add_option("--n-candidates", cli.n_candidates, "candidates per step / rollouts per path");
  app->add_option("--beam-window", cli.beam_window, "beam width");
  app->add_option("--max-steps", cli.max_steps, "chain length cap");
  app->add_option("--seed", cli.seed, "root seed")->each([&](const std::string&) {
    cli.seed_set = true;
  });
  app->add_option("--parallelism", cli.parallelism, "bounded per-question parallelism");
  app->add_option("--temperature-start", cli.temperature_start, "first rung of the ladder");
}

void add_backend_flags(CLI::App* app, atomcot::cli::BackendOptions& backend) {
  app->add_option("--backend", backend.kind, "mock|http")->default_str("mock");
  app->add_option("--tasks", backend.tasks_path, "synthetic tasks JSONL (mock backend)");
  app->add_option("--bias", backend.policy_correct_bias,
                  "mock policy mass on the correct child");
  app->add_option("--reward-noise", backend.reward_noise_sigma, "mock reward noise sigma");
  app->add_option("--base-url", backend.base_url, "chat-completions endpoint (http backend)");
  app->add_option("--model", backend.model, "remote model name");
  app->add_option("--templates", backend.template_dir, "prompt template overlay directory");
}

// File first, then flags on top.
int resolve_config(const ConfigCli& cli, SearchConfig& config) {
  if (!cli.config_path.empty()) {
    std::ifstream in(cli.config_path);
    if (!in) {
      std::fprintf(stderr, "config error: cannot open %s\n", cli.config_path.c_str());
      return 2;
    }
    try {
      nlohmann::json j;
      in >> j;
      config = atomcot::config_from_json(j);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "config error: %s: %s\n", cli.config_path.c_str(), e.what());
      return 2;
    }
  }
  if (!cli.strategy.empty()) {
    auto s = atomcot::strategy_from_string(cli.strategy);
    if (!s) {
      std::fprintf(stderr, "config error: unknown strategy %s\n", cli.strategy.c_str());
      return 2;
    }
    config.strategy = *s;
  }
  if (!cli.aggregation.empty()) {
    auto a = atomcot::aggregation_from_string(cli.aggregation);
    if (!a) {
      std::fprintf(stderr, "config error: unknown aggregation %s\n", cli.aggregation.c_str());
      return 2;
    }
    config.aggregation = *a;
  }
  if (cli.n_candidates >= 0) config.n_candidates = cli.n_candidates;
  if (cli.beam_window >= 0) config.beam_window = cli.beam_window;
  if (cli.max_steps >= 0) config.max_steps = cli.max_steps;
  if (cli.seed_set) config.seed = cli.seed;
  if (cli.parallelism >= 0) config.parallelism = cli.parallelism;
  if (cli.temperature_start >= 0.0) config.temperature_start = cli.temperature_start;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"atomic-step chain-of-thought engine"};
  app.require_subcommand(1);

  // simenv-gen
  atomcot::cli::SimenvGenOptions gen_opts;
  CLI::App* gen = app.add_subcommand("simenv-gen", "generate synthetic reasoning tasks");
  gen->add_option("--count", gen_opts.count, "number of tasks");
  gen->add_option("--branching", gen_opts.branching, "children per node");
  gen->add_option("--depth", gen_opts.depth, "tree depth");
  gen->add_option("--seed", gen_opts.seed, "generation seed");
  gen->add_option("--out", gen_opts.out_dir, "output directory")->required();

  // infer
  atomcot::cli::InferOptions infer_opts;
  ConfigCli infer_cfg;
  CLI::App* infer = app.add_subcommand("infer", "run inference or search over questions");
  add_backend_flags(infer, infer_opts.backend);
  add_config_flags(infer, infer_cfg);
  infer->add_option("--questions", infer_opts.questions_path, "question JSONL (http backend)");
  infer->add_option("--out", infer_opts.out_dir, "output directory")->required();

  // pipeline
  atomcot::cli::PipelineOptions pipe_opts;
  ConfigCli pipe_cfg;
  CLI::App* pipe = app.add_subcommand("pipeline", "dataset pipeline stages");
  pipe->add_option("--stage", pipe_opts.stage, "generate|augment|difficulty|filter|sft")
      ->required();
  add_backend_flags(pipe, pipe_opts.backend);
  add_config_flags(pipe, pipe_cfg);
  pipe->add_option("--questions", pipe_opts.questions_path, "question JSONL");
  pipe->add_option("--chains", pipe_opts.chains_path, "chain JSONL (sft stage)");
  pipe->add_option("--difficulty", pipe_opts.difficulty_path, "difficulty CSV (filter stage)");
  pipe->add_option("--reviews", pipe_opts.reviews_path, "review verdict JSONL (filter stage)");
  pipe->add_option("--n-rollouts", pipe_opts.n_samples, "rollouts per question (difficulty)");
  pipe->add_option("--remove-at-or-below", pipe_opts.filter.remove_level_at_or_below,
                   "difficulty removal threshold");
  bool inverse_reading = false;
  pipe->add_flag("--inverse-difficulty", inverse_reading,
                 "read 1 - win rate as the difficulty level");
  pipe->add_option("--out", pipe_opts.out_dir, "output directory")->required();

  // eval
  atomcot::cli::EvalOptions eval_opts;
  ConfigCli eval_cfg;
  CLI::App* ev = app.add_subcommand("eval", "capability evaluation and reports");
  ev->add_option("--mode", eval_opts.mode, "distribution|utilization|scores|scaling")
      ->required();
  add_backend_flags(ev, eval_opts.backend);
  add_config_flags(ev, eval_cfg);
  ev->add_option("--chains", eval_opts.chains_path, "chain JSONL (distribution mode)");
  ev->add_option("--records", eval_opts.records_path, "utilization JSONL (scores mode)");
  ev->add_option("--taxonomy", eval_opts.taxonomy_path, "ability taxonomy JSON");
  ev->add_option("--manifests", eval_opts.manifest_paths, "manifests (scaling mode)");
  ev->add_option("--rollouts", eval_opts.rollouts, "continuations per prefix");
  ev->add_option("--prefix-lengths", eval_opts.prefix_lengths, "prefix lengths to probe");
  ev->add_option("--out", eval_opts.out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    return atomcot::cli::cmd_simenv_gen(gen_opts);
  }
  if (infer->parsed()) {
    if (int rc = resolve_config(infer_cfg, infer_opts.config)) return rc;
    return atomcot::cli::cmd_infer(infer_opts);
  }
  if (pipe->parsed()) {
    if (int rc = resolve_config(pipe_cfg, pipe_opts.config)) return rc;
    if (inverse_reading) {
      pipe_opts.filter.reading = atomcot::data::DifficultyReading::InverseWinRate;
    }
    return atomcot::cli::cmd_pipeline(pipe_opts);
  }
  if (ev->parsed()) {
    if (int rc = resolve_config(eval_cfg, eval_opts.config)) return rc;
    return atomcot::cli::cmd_eval(eval_opts);
  }
  return 0;
}
