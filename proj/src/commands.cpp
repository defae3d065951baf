#include "atomcot/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>

#include "atomcot/ability_eval.hpp"
#include "atomcot/backends.hpp"
#include "atomcot/csv.hpp"
#include "atomcot/http_backend.hpp"
#include "atomcot/jsonl.hpp"
#include "atomcot/policy_search.hpp"
#include "atomcot/run_manifest.hpp"
#include "atomcot/scot_engine.hpp"
#include "atomcot/seeding.hpp"
#include "atomcot/sim_env.hpp"
#include "atomcot/template_store.hpp"

namespace atomcot::cli {

namespace fs = std::filesystem;

namespace {

int fail_config(const std::string& message) {
  std::fprintf(stderr, "config error: %s\n", message.c_str());
  return 2;
}

int fail_runtime(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return 1;
}

struct Wiring {
  std::vector<Question> questions;
  std::unique_ptr<PolicyBackend> policy;
  std::unique_ptr<RewardBackend> reward;  // only when requested
  std::vector<std::string> inputs;
};

TemplateStore make_templates(const BackendOptions& opts) {
  if (!opts.template_dir.empty()) return TemplateStore::from_dir(opts.template_dir);
  return TemplateStore::builtin();
}

/// Builds backends and the question list. Mock mode derives questions from
/// the synthetic tasks; http mode reads a question JSONL.
EngineResult<Wiring> wire_up(const BackendOptions& opts, const std::string& questions_path,
                             uint64_t seed, bool want_reward) {
  Wiring w;
  if (opts.kind == "mock") {
    if (opts.tasks_path.empty()) {
      return EngineError{EngineErrorKind::BadInput, "mock backend requires --tasks"};
    }
    auto tasks = read_jsonl(opts.tasks_path, sim::task_from_json);
    w.inputs.push_back(opts.tasks_path);
    for (const auto& t : tasks) w.questions.push_back(sim::question_for(t));
    sim::NoiseSpec noise{opts.reward_noise_sigma, opts.policy_correct_bias};
    w.policy = std::make_unique<sim::SimPolicyBackend>(tasks, noise);
    if (want_reward) {
      w.reward = std::make_unique<sim::SimRewardBackend>(tasks, noise,
                                                         derive_seed(seed, fnv1a64("reward")));
    }
  } else if (opts.kind == "http") {
    if (opts.base_url.empty()) {
      return EngineError{EngineErrorKind::BadInput, "http backend requires --base-url"};
    }
    if (questions_path.empty()) {
      return EngineError{EngineErrorKind::BadInput, "http backend requires --questions"};
    }
    w.questions = read_jsonl(questions_path, question_from_json);
    w.inputs.push_back(questions_path);
    HttpBackendConfig hc;
    hc.base_url = opts.base_url;
    hc.model = opts.model;
    w.policy = std::make_unique<HttpPolicyBackend>(hc, make_templates(opts));
    if (want_reward) {
      w.reward = std::make_unique<HttpRewardBackend>(hc, make_templates(opts));
    }
  } else {
    return EngineError{EngineErrorKind::BadInput, "unknown backend kind: " + opts.kind};
  }
  return w;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

RunManifest base_manifest(const std::string& command, const SearchConfig& config,
                          const Wiring& w, const Timer& timer) {
  RunManifest m;
  m.command = command;
  m.config = config_to_json(config);
  m.seed = config.seed;
  m.policy_backend = w.policy ? w.policy->id() : "";
  m.reward_backend = w.reward ? w.reward->id() : "";
  m.inputs = w.inputs;
  m.duration_ms = timer.elapsed_ms();
  m.policy_calls = w.policy ? w.policy->calls() : 0;
  m.reward_calls = w.reward ? w.reward->calls() : 0;
  m.gen_units = w.policy ? w.policy->units_generated() : 0;
  return m;
}

std::optional<double> accuracy_against_gold(const std::vector<Question>& questions,
                                            const std::vector<ReasoningChain>& chains) {
  int with_gold = 0;
  int correct = 0;
  for (size_t i = 0; i < chains.size() && i < questions.size(); ++i) {
    if (!questions[i].gold_answer) continue;
    with_gold += 1;
    if (chains[i].final_answer &&
        scot::answers_match(*chains[i].final_answer, *questions[i].gold_answer)) {
      correct += 1;
    }
  }
  if (with_gold == 0) return std::nullopt;
  return static_cast<double>(correct) / with_gold;
}

}  // namespace

int cmd_simenv_gen(const SimenvGenOptions& opts) {
  if (opts.out_dir.empty()) return fail_config("--out is required");
  if (opts.count < 1) return fail_config("--count must be >= 1");
  Timer timer;
  try {
    const auto tasks = sim::generate_tasks(opts.count, opts.branching, opts.depth, opts.seed);
    fs::create_directories(opts.out_dir);
    const fs::path out = fs::path(opts.out_dir) / "tasks.jsonl";
    write_jsonl(out, tasks, [](const sim::SynthTask& t) { return sim::to_json(t); });

    RunManifest m;
    m.command = "simenv-gen";
    m.config = {{"count", opts.count}, {"branching", opts.branching}, {"depth", opts.depth}};
    m.seed = opts.seed;
    m.outputs = {out.string()};
    m.duration_ms = timer.elapsed_ms();
    write_manifest(fs::path(opts.out_dir) / "manifest.json", m);
    return 0;
  } catch (const std::invalid_argument& e) {
    return fail_config(e.what());
  } catch (const std::exception& e) {
    return fail_runtime(e.what());
  }
}

int cmd_infer(const InferOptions& opts) {
  if (opts.out_dir.empty()) return fail_config("--out is required");
  if (auto errors = validate_config(opts.config); !errors.empty()) {
    return fail_config(errors.front());
  }

  const bool needs_reward = opts.config.strategy == SearchStrategy::BestOfN ||
                            opts.config.strategy == SearchStrategy::Greedy ||
                            opts.config.strategy == SearchStrategy::BeamSearch;
  Timer timer;
  try {
    auto wired = wire_up(opts.backend, opts.questions_path, opts.config.seed, needs_reward);
    if (!wired.ok()) return fail_config(wired.error().message);
    Wiring& w = wired.value();

    fs::create_directories(opts.out_dir);
    int failures = 0;
    std::mutex failure_mutex;
    std::vector<std::string> output_files;
    std::optional<double> accuracy;

    if (opts.config.strategy == SearchStrategy::Quick ||
        opts.config.strategy == SearchStrategy::MajorityVoting) {
      std::vector<ReasoningChain> chains(w.questions.size());
      parallel_for(w.questions.size(), opts.config.parallelism, [&](size_t i) {
        const Question& q = w.questions[i];
        if (opts.config.strategy == SearchStrategy::Quick) {
          chains[i] = scot::run_scot(q, *w.policy, opts.config);
          return;
        }
        std::vector<ReasoningChain> rollouts;
        for (int c = 0; c < opts.config.n_candidates; ++c) {
          rollouts.push_back(
              scot::run_scot(q, *w.policy, search::rollout_config(opts.config, q, c)));
        }
        auto voted = search::majority_vote(std::span<const ReasoningChain>(rollouts));
        if (voted.ok()) {
          chains[i] = voted.value();
        } else {
          std::lock_guard<std::mutex> lock(failure_mutex);
          failures += 1;
          chains[i].question_id = q.id;
          chains[i].termination = Termination::aborted(voted.error().message);
        }
      });
      const fs::path out = fs::path(opts.out_dir) / "chains.jsonl";
      write_jsonl(out, chains, [](const ReasoningChain& c) { return to_json(c); });
      output_files.push_back(out.string());
      accuracy = accuracy_against_gold(w.questions, chains);
    } else {
      std::vector<std::optional<std::pair<search::ScoredChain, search::SearchStats>>> results(
          w.questions.size());
      parallel_for(w.questions.size(), opts.config.parallelism, [&](size_t i) {
        const Question& q = w.questions[i];
        EngineResult<search::SearchResult> r = [&] {
          switch (opts.config.strategy) {
            case SearchStrategy::BestOfN:
              return search::best_of_n(q, *w.policy, *w.reward, opts.config);
            case SearchStrategy::Greedy:
              return search::greedy_search(q, *w.policy, *w.reward, opts.config);
            default:
              return search::beam_search(q, *w.policy, *w.reward, opts.config);
          }
        }();
        if (r.ok()) {
          results[i] = std::make_pair(std::move(r.value().best), std::move(r.value().stats));
        } else {
          std::lock_guard<std::mutex> lock(failure_mutex);
          failures += 1;
          std::fprintf(stderr, "question %s failed: %s\n", q.id.c_str(),
                       r.error().message.c_str());
        }
      });
      const fs::path out = fs::path(opts.out_dir) / "scored_chains.jsonl";
      std::ofstream file(out);
      std::vector<ReasoningChain> chains;
      std::vector<Question> answered;
      for (size_t i = 0; i < results.size(); ++i) {
        if (!results[i]) continue;
        file << search::to_json_with_stats(results[i]->first, results[i]->second).dump() << "\n";
        chains.push_back(results[i]->first.chain);
        answered.push_back(w.questions[i]);
      }
      output_files.push_back(out.string());
      accuracy = accuracy_against_gold(answered, chains);
    }

    RunManifest m = base_manifest("infer", opts.config, w, timer);
    m.config["failures"] = failures;
    m.outputs = output_files;
    m.accuracy = accuracy;
    write_manifest(fs::path(opts.out_dir) / "manifest.json", m);
    return 0;
  } catch (const JsonlError& e) {
    return fail_runtime(e.what());
  } catch (const std::exception& e) {
    return fail_runtime(e.what());
  }
}

int cmd_pipeline(const PipelineOptions& opts) {
  if (opts.out_dir.empty()) return fail_config("--out is required");
  if (auto errors = validate_config(opts.config); !errors.empty()) {
    return fail_config(errors.front());
  }
  Timer timer;
  try {
    fs::create_directories(opts.out_dir);

    if (opts.stage == "sft") {
      if (opts.chains_path.empty()) return fail_config("sft stage requires --chains");
      const auto chains = read_jsonl(opts.chains_path, chain_from_json);
      std::vector<data::SftSample> samples;
      int skipped = 0;
      for (const auto& chain : chains) {
        auto expanded = data::build_sft_samples(chain);
        if (!expanded.ok()) {
          skipped += 1;
          continue;
        }
        for (auto& s : expanded.value()) samples.push_back(std::move(s));
      }
      if (skipped > 0) {
        std::fprintf(stderr, "sft: skipped %d non-concluded chains\n", skipped);
      }
      const fs::path out = fs::path(opts.out_dir) / "sft_samples.jsonl";
      write_jsonl(out, samples, [](const data::SftSample& s) { return data::to_json(s); });

      RunManifest m;
      m.command = "pipeline:sft";
      m.config = config_to_json(opts.config);
      m.config["skipped"] = skipped;
      m.seed = opts.config.seed;
      m.inputs = {opts.chains_path};
      m.outputs = {out.string()};
      m.duration_ms = timer.elapsed_ms();
      write_manifest(fs::path(opts.out_dir) / "manifest.json", m);
      return 0;
    }

    if (opts.stage == "filter") {
      if (opts.difficulty_path.empty()) return fail_config("filter stage requires --difficulty");
      auto [header, rows] = csv::read_csv(opts.difficulty_path);
      std::vector<data::DifficultyRecord> records;
      for (const auto& row : rows) {
        if (row.size() < 4) {
          return fail_runtime("malformed difficulty row in " + opts.difficulty_path);
        }
        data::DifficultyRecord r;
        r.question_id = row[0];
        r.n_samples = std::stoi(row[1]);
        r.n_correct = std::stoi(row[2]);
        r.level = std::stod(row[3]);
        records.push_back(std::move(r));
      }
      std::vector<data::ReviewVerdict> reviews;
      std::vector<std::string> inputs = {opts.difficulty_path};
      if (!opts.reviews_path.empty()) {
        reviews = read_jsonl(opts.reviews_path, data::review_verdict_from_json);
        inputs.push_back(opts.reviews_path);
      }
      const auto kept = data::filter_dataset(records, reviews, opts.filter);
      const fs::path out = fs::path(opts.out_dir) / "kept_ids.txt";
      std::ofstream file(out);
      for (const auto& id : kept) file << id << "\n";

      RunManifest m;
      m.command = "pipeline:filter";
      m.config = config_to_json(opts.config);
      m.config["remove_level_at_or_below"] = opts.filter.remove_level_at_or_below;
      m.config["kept"] = kept.size();
      m.seed = opts.config.seed;
      m.inputs = inputs;
      m.outputs = {out.string()};
      m.duration_ms = timer.elapsed_ms();
      write_manifest(fs::path(opts.out_dir) / "manifest.json", m);
      return 0;
    }

    if (opts.stage == "difficulty") {
      auto wired = wire_up(opts.backend, opts.questions_path, opts.config.seed, false);
      if (!wired.ok()) return fail_config(wired.error().message);
      Wiring& w = wired.value();

      std::vector<data::DifficultyRecord> records(w.questions.size());
      std::vector<std::string> failures;
      std::mutex failure_mutex;
      parallel_for(w.questions.size(), opts.config.parallelism, [&](size_t i) {
        auto r = data::score_difficulty(w.questions[i], *w.policy, opts.n_samples, opts.config);
        if (r.ok()) {
          records[i] = r.value();
        } else {
          std::lock_guard<std::mutex> lock(failure_mutex);
          failures.push_back(w.questions[i].id + ": " + r.error().message);
        }
      });
      for (const auto& f : failures) std::fprintf(stderr, "difficulty: %s\n", f.c_str());
      records.erase(std::remove_if(records.begin(), records.end(),
                                   [](const data::DifficultyRecord& r) {
                                     return r.question_id.empty();
                                   }),
                    records.end());

      std::vector<csv::Row> rows;
      for (const auto& r : records) {
        rows.push_back({r.question_id, std::to_string(r.n_samples),
                        std::to_string(r.n_correct), csv::format_double(r.level)});
      }
      const fs::path out = fs::path(opts.out_dir) / "difficulty.csv";
      csv::write_csv(out, {"question_id", "n_samples", "n_correct", "level"}, rows);

      RunManifest m = base_manifest("pipeline:difficulty", opts.config, w, timer);
      m.config["n_samples"] = opts.n_samples;
      m.config["failures"] = failures.size();
      m.outputs = {out.string()};
      write_manifest(fs::path(opts.out_dir) / "manifest.json", m);
      return 0;
    }

    if (opts.stage == "generate" || opts.stage == "augment") {
      if (opts.backend.kind != "http") {
        return fail_config(opts.stage +
                           " stage needs an instruction-following backend; use --backend http");
      }
      auto wired = wire_up(opts.backend, opts.questions_path, opts.config.seed, false);
      if (!wired.ok()) return fail_config(wired.error().message);
      Wiring& w = wired.value();
      const TemplateStore templates = make_templates(opts.backend);

      std::vector<std::optional<ReasoningChain>> chains(w.questions.size());
      std::vector<std::string> failures;
      std::mutex failure_mutex;
      parallel_for(w.questions.size(), opts.config.parallelism, [&](size_t i) {
        const Question& q = w.questions[i];
        EngineResult<ReasoningChain> r = [&]() -> EngineResult<ReasoningChain> {
          if (opts.stage == "generate") {
            return data::generate_long_cot(q, *w.policy, templates, opts.config);
          }
          auto it = q.metadata.find("short_cot");
          if (it == q.metadata.end()) {
            return EngineError{EngineErrorKind::BadInput,
                               "question has no short_cot metadata"};
          }
          return data::augment_short_cot(q, it->second, *w.policy, templates, opts.config);
        }();
        if (r.ok()) {
          chains[i] = std::move(r.value());
        } else {
          std::lock_guard<std::mutex> lock(failure_mutex);
          failures.push_back(q.id + ": " + r.error().message);
        }
      });
      for (const auto& f : failures) {
        std::fprintf(stderr, "%s: %s\n", opts.stage.c_str(), f.c_str());
      }

      const fs::path out = fs::path(opts.out_dir) / "chains.jsonl";
      std::ofstream file(out);
      for (const auto& c : chains) {
        if (c) file << to_json(*c).dump() << "\n";
      }

      RunManifest m = base_manifest("pipeline:" + opts.stage, opts.config, w, timer);
      m.config["failures"] = failures.size();
      m.outputs = {out.string()};
      write_manifest(fs::path(opts.out_dir) / "manifest.json", m);
      return 0;
    }

    return fail_config("unknown pipeline stage: " + opts.stage);
  } catch (const JsonlError& e) {
    return fail_runtime(e.what());
  } catch (const std::exception& e) {
    return fail_runtime(e.what());
  }
}

namespace {

eval::AbilityTaxonomy taxonomy_for(const EvalOptions& opts) {
  if (!opts.taxonomy_path.empty()) return eval::AbilityTaxonomy::load(opts.taxonomy_path);
  return eval::AbilityTaxonomy::defaults();
}

}  // namespace

int cmd_eval(const EvalOptions& opts) {
  if (opts.out_dir.empty()) return fail_config("--out is required");
  Timer timer;
  try {
    fs::create_directories(opts.out_dir);
    const eval::AbilityTaxonomy taxonomy = taxonomy_for(opts);

    if (opts.mode == "distribution") {
      if (opts.chains_path.empty()) return fail_config("distribution mode requires --chains");
      const auto chains = read_jsonl(opts.chains_path, chain_from_json);
      const auto dist = eval::behavior_distribution(chains, taxonomy);
      std::vector<csv::Row> rows;
      for (const auto& [name, fraction] : dist) {
        rows.push_back({name, csv::format_double(fraction)});
      }
      const fs::path out = fs::path(opts.out_dir) / "behavior_distribution.csv";
      csv::write_csv(out, {"category", "fraction"}, rows);

      RunManifest m;
      m.command = "eval:distribution";
      m.config = config_to_json(opts.config);
      m.seed = opts.config.seed;
      m.inputs = {opts.chains_path};
      m.outputs = {out.string()};
      m.duration_ms = timer.elapsed_ms();
      write_manifest(fs::path(opts.out_dir) / "manifest.json", m);
      return 0;
    }

    if (opts.mode == "scores") {
      if (opts.records_path.empty()) return fail_config("scores mode requires --records");
      const auto records = read_jsonl(opts.records_path, eval::utilization_record_from_json);
      auto scores = eval::ability_scores(records, taxonomy);
      if (!scores.ok()) return fail_config(scores.error().message);
      std::vector<csv::Row> rows;
      for (const auto& s : scores.value()) {
        rows.push_back({s.category, std::to_string(s.member_count),
                        s.score ? csv::format_double(*s.score) : ""});
      }
      const fs::path out = fs::path(opts.out_dir) / "ability_scores.csv";
      csv::write_csv(out, {"category", "member_count", "score"}, rows);

      RunManifest m;
      m.command = "eval:scores";
      m.config = config_to_json(opts.config);
      m.seed = opts.config.seed;
      m.inputs = {opts.records_path};
      m.outputs = {out.string()};
      m.duration_ms = timer.elapsed_ms();
      write_manifest(fs::path(opts.out_dir) / "manifest.json", m);
      return 0;
    }

    if (opts.mode == "utilization") {
      if (opts.backend.kind != "mock") {
        return fail_config("utilization mode currently runs on the mock backend");
      }
      if (opts.backend.tasks_path.empty()) return fail_config("utilization mode requires --tasks");
      const auto tasks = read_jsonl(opts.backend.tasks_path, sim::task_from_json);
      sim::NoiseSpec noise{opts.backend.reward_noise_sigma, opts.backend.policy_correct_bias};
      sim::SimPolicyBackend policy(tasks, noise);

      std::vector<eval::UtilizationRecord> records;
      std::vector<eval::RolloutLog> logs;
      for (const auto& task : tasks) {
        const Question q = sim::question_for(task);
        std::vector<int> lengths = opts.prefix_lengths;
        if (lengths.empty()) {
          for (int len = 1; len < task.depth; ++len) lengths.push_back(len);
        }
        for (int len : lengths) {
          if (len < 1 || len >= static_cast<int>(task.correct_path.size())) continue;
          std::vector<AtomicStep> prefix;
          for (int i = 1; i <= len; ++i) {
            AtomicStep s;
            s.index = i - 1;
            s.text = task.node(task.correct_path[static_cast<size_t>(i)]).text;
            prefix.push_back(std::move(s));
          }
          auto record = eval::step_utilization(q, prefix, policy, opts.rollouts,
                                               task.gold_answer, opts.config, &taxonomy, &logs);
          if (record.ok()) {
            records.push_back(record.value());
          } else {
            std::fprintf(stderr, "utilization: %s: %s\n", q.id.c_str(),
                         record.error().message.c_str());
          }
        }
      }

      std::vector<csv::Row> rows;
      for (const auto& r : records) {
        rows.push_back({r.question_id, std::to_string(r.prefix_length),
                        std::to_string(r.rollouts), std::to_string(r.correct_count),
                        csv::format_double(r.rate), r.ability_of_last_step});
      }
      const fs::path util_csv = fs::path(opts.out_dir) / "utilization.csv";
      csv::write_csv(util_csv,
                     {"question_id", "prefix_length", "rollouts", "correct_count", "rate",
                      "ability_of_last_step"},
                     rows);
      const fs::path log_out = fs::path(opts.out_dir) / "rollout_log.jsonl";
      write_jsonl(log_out, logs, [](const eval::RolloutLog& r) { return eval::to_json(r); });
      const fs::path records_out = fs::path(opts.out_dir) / "utilization.jsonl";
      write_jsonl(records_out, records,
                  [](const eval::UtilizationRecord& r) { return eval::to_json(r); });

      auto scores = eval::ability_scores(records, taxonomy);
      if (!scores.ok()) return fail_runtime(scores.error().message);
      std::vector<csv::Row> score_rows;
      for (const auto& s : scores.value()) {
        score_rows.push_back({s.category, std::to_string(s.member_count),
                              s.score ? csv::format_double(*s.score) : ""});
      }
      const fs::path scores_out = fs::path(opts.out_dir) / "ability_scores.csv";
      csv::write_csv(scores_out, {"category", "member_count", "score"}, score_rows);

      RunManifest m;
      m.command = "eval:utilization";
      m.config = config_to_json(opts.config);
      m.config["rollouts"] = opts.rollouts;
      m.seed = opts.config.seed;
      m.policy_backend = policy.id();
      m.inputs = {opts.backend.tasks_path};
      m.outputs = {util_csv.string(), records_out.string(), log_out.string(),
                   scores_out.string()};
      m.duration_ms = timer.elapsed_ms();
      m.policy_calls = policy.calls();
      m.gen_units = policy.units_generated();
      write_manifest(fs::path(opts.out_dir) / "manifest.json", m);
      return 0;
    }

    if (opts.mode == "scaling") {
      if (opts.manifest_paths.empty()) return fail_config("scaling mode requires --manifests");
      struct ScalingRow {
        int n_candidates;
        double accuracy;
        long long policy_calls, reward_calls, gen_units;
      };
      std::vector<ScalingRow> scaling;
      for (const auto& path : opts.manifest_paths) {
        const RunManifest m = load_manifest(path);
        ScalingRow row{};
        row.n_candidates = m.config.value("n_candidates", 0);
        row.accuracy = m.accuracy.value_or(0.0);
        row.policy_calls = m.policy_calls;
        row.reward_calls = m.reward_calls;
        row.gen_units = m.gen_units;
        scaling.push_back(row);
      }
      std::sort(scaling.begin(), scaling.end(),
                [](const ScalingRow& a, const ScalingRow& b) {
                  return a.n_candidates < b.n_candidates;
                });
      std::vector<csv::Row> rows;
      for (const auto& r : scaling) {
        rows.push_back({std::to_string(r.n_candidates), csv::format_double(r.accuracy),
                        std::to_string(r.policy_calls), std::to_string(r.reward_calls),
                        std::to_string(r.gen_units)});
      }
      const fs::path out = fs::path(opts.out_dir) / "scaling.csv";
      csv::write_csv(out, {"n_candidates", "accuracy", "policy_calls", "reward_calls",
                           "gen_units"},
                     rows);

      RunManifest m;
      m.command = "eval:scaling";
      m.config = config_to_json(opts.config);
      m.seed = opts.config.seed;
      m.inputs = opts.manifest_paths;
      m.outputs = {out.string()};
      m.duration_ms = timer.elapsed_ms();
      write_manifest(fs::path(opts.out_dir) / "manifest.json", m);
      return 0;
    }

    return fail_config("unknown eval mode: " + opts.mode);
  } catch (const JsonlError& e) {
    return fail_runtime(e.what());
  } catch (const std::exception& e) {
    return fail_runtime(e.what());
  }
}

}  // namespace atomcot::cli
