#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "atomcot/jsonl.hpp"
#include "atomcot/policy_search.hpp"
#include "atomcot/seeding.hpp"
#include "atomcot/sim_env.hpp"
#include "test_helpers.hpp"

using namespace atomcot;
using namespace atomcot::search;
using atomcot::testing::FnPolicyBackend;
using atomcot::testing::TablePolicyReward;

namespace {

std::vector<StepScore> scores_of(std::initializer_list<double> values) {
  std::vector<StepScore> out;
  int i = 0;
  for (double v : values) out.push_back({i++, v});
  return out;
}

ReasoningChain concluded_chain(const std::string& qid, const std::string& answer) {
  ReasoningChain c;
  c.question_id = qid;
  AtomicStep s;
  s.index = 0;
  s.text = "The final answer is " + answer;
  c.steps.push_back(s);
  c.final_answer = scot::normalize_answer(answer);
  c.termination = Termination::concluded();
  return c;
}

}  // namespace

TEST_CASE("aggregate_path Min/Last/Avg") {
  const auto s = scores_of({0.9, 0.2, 0.8});
  CHECK(aggregate_path(s, Aggregation::Min).value() == 0.2);
  CHECK(aggregate_path(s, Aggregation::Last).value() == 0.8);
  CHECK(aggregate_path(s, Aggregation::Avg).value() ==
        doctest::Approx(0.6333333333333333).epsilon(1e-9));
  auto err = aggregate_path({}, Aggregation::Min);
  REQUIRE_FALSE(err.ok());
  CHECK(err.error().kind == EngineErrorKind::EmptyScores);
}

TEST_CASE("aggregator dominance: Min <= Avg <= Max and Min <= Last <= Max") {
  Rng rng(909);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    std::vector<StepScore> s;
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = rng.uniform01();
      s.push_back({i, v});
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mn = aggregate_path(s, Aggregation::Min).value();
    const double avg = aggregate_path(s, Aggregation::Avg).value();
    const double last = aggregate_path(s, Aggregation::Last).value();
    CHECK(mn == lo);
    CHECK(mn <= avg + 1e-12);
    CHECK(avg <= hi + 1e-12);
    CHECK(mn <= last);
    CHECK(last <= hi);
  }
}

TEST_CASE("majority_vote picks the modal answer") {
  std::vector<ReasoningChain> chains{concluded_chain("q", "7"), concluded_chain("q", "7"),
                                     concluded_chain("q", "5")};
  auto winner = majority_vote(std::span<const ReasoningChain>(chains));
  REQUIRE(winner.ok());
  CHECK(winner.value().final_answer == "7");
}

TEST_CASE("majority_vote scored tie-break prefers the higher average score") {
  ScoredChain a;
  a.chain = concluded_chain("q", "a");
  a.step_scores = scores_of({0.4});
  ScoredChain b;
  b.chain = concluded_chain("q", "b");
  b.step_scores = scores_of({0.6});
  std::vector<ScoredChain> chains{a, b};
  auto winner = majority_vote(std::span<const ScoredChain>(chains));
  REQUIRE(winner.ok());
  CHECK(winner.value().chain.final_answer == "b");
}

TEST_CASE("majority_vote without scores breaks ties by earliest index") {
  std::vector<ReasoningChain> chains{concluded_chain("q", "x"), concluded_chain("q", "y")};
  auto winner = majority_vote(std::span<const ReasoningChain>(chains));
  REQUIRE(winner.ok());
  CHECK(winner.value().final_answer == "x");
}

TEST_CASE("majority_vote errors on empty or unconcluded input") {
  auto err = majority_vote(std::span<const ReasoningChain>{});
  REQUIRE_FALSE(err.ok());
  CHECK(err.error().kind == EngineErrorKind::NoConcludedChains);

  ReasoningChain aborted;
  aborted.question_id = "q";
  aborted.termination = Termination::aborted("x");
  std::vector<ReasoningChain> chains{aborted};
  err = majority_vote(std::span<const ReasoningChain>(chains));
  REQUIRE_FALSE(err.ok());
  CHECK(err.error().kind == EngineErrorKind::NoConcludedChains);
}

TEST_CASE("best_of_n with the oracle reward finds the correct rollout") {
  const auto task = sim::generate_tasks(1, 2, 3, 404).at(0);
  const Question q = sim::question_for(task);
  sim::SimPolicyBackend policy({task}, {0.0, 0.6});
  sim::SimRewardBackend reward({task}, {0.0, 0.6}, 1);

  SearchConfig cfg;
  cfg.n_candidates = 3;
  cfg.temperature_start = 1.0;  // sample diverse rollouts

  // Independent enumeration: replay the three rollouts directly and pick a
  // seed whose samples are distinct and include the correct path. Selection
  // over that fixture must then return exactly the correct rollout.
  std::optional<uint64_t> fixture_seed;
  for (uint64_t seed = 0; seed < 200 && !fixture_seed; ++seed) {
    cfg.seed = seed;
    std::set<std::string> answers;
    bool correct_present = false;
    for (int i = 0; i < cfg.n_candidates; ++i) {
      const ReasoningChain r = scot::run_scot(q, policy, rollout_config(cfg, q, i));
      if (r.final_answer) answers.insert(*r.final_answer);
      correct_present |= r.final_answer == task.gold_answer;
    }
    if (correct_present && answers.size() >= 2) fixture_seed = seed;
  }
  REQUIRE(fixture_seed.has_value());

  cfg.seed = *fixture_seed;
  auto result = best_of_n(q, policy, reward, cfg);
  REQUIRE(result.ok());
  auto truth = sim::brute_force_best(task, reward, cfg.aggregation);
  REQUIRE(truth.ok());
  CHECK(result.value().best.chain.final_answer == task.gold_answer);
  CHECK(result.value().best.chain.final_answer ==
        scot::extract_answer(task.node(truth.value().leaf_id).text));
}

TEST_CASE("best_of_n with n=1 equals run_scot on the same seed") {
  const auto task = sim::generate_tasks(1, 2, 3, 31).at(0);
  const Question q = sim::question_for(task);
  sim::SimPolicyBackend policy({task}, {0.0, 0.6});
  sim::SimRewardBackend reward({task}, {0.0, 0.6}, 2);

  SearchConfig cfg;
  cfg.n_candidates = 1;
  cfg.temperature_start = 1.0;
  cfg.seed = 99;
  auto result = best_of_n(q, policy, reward, cfg);
  REQUIRE(result.ok());
  const ReasoningChain direct = scot::run_scot(q, policy, cfg);
  CHECK(to_jsonl_line(result.value().best.chain) == to_jsonl_line(direct));
}

TEST_CASE("best_of_n reports AllRolloutsAborted when every rollout dies") {
  // A policy that repeats itself forever: every rollout aborts on step 2.
  FnPolicyBackend policy([](const PolicyRequest&) -> BackendResult<PolicyResponse> {
    PolicyResponse r;
    r.text = "One single thought, always the same.";
    return r;
  });
  TablePolicyReward reward({});
  Question q{"q", "text", {}, {}, {}};
  SearchConfig cfg;
  cfg.n_candidates = 2;
  auto result = best_of_n(q, policy, reward, cfg);
  REQUIRE_FALSE(result.ok());
  CHECK(result.error().kind == EngineErrorKind::AllRolloutsAborted);
}

TEST_CASE("greedy on a depth-3 binary tree with oracle reward: correct path, 6 reward calls") {
  const auto task = sim::generate_tasks(1, 2, 3, 71).at(0);
  const Question q = sim::question_for(task);
  sim::SimPolicyBackend policy({task}, {0.0, 0.6});
  sim::SimRewardBackend reward({task}, {0.0, 0.6}, 3);

  SearchConfig cfg;
  cfg.n_candidates = 2;
  cfg.seed = 11;
  auto result = greedy_search(q, policy, reward, cfg);
  REQUIRE(result.ok());
  CHECK(result.value().best.chain.final_answer == task.gold_answer);
  CHECK(result.value().stats.reward_calls == 6);
  CHECK(reward.calls() == 6);
  REQUIRE(result.value().stats.per_depth.size() == 3);
  for (const auto& d : result.value().stats.per_depth) {
    CHECK(d.policy_calls == 2);
    CHECK(d.reward_calls == 2);
  }
}

TEST_CASE("greedy with candidates=1 follows the run_scot trajectory") {
  const auto task = sim::generate_tasks(1, 2, 3, 72).at(0);
  const Question q = sim::question_for(task);
  sim::SimPolicyBackend policy({task}, {0.0, 0.6});
  sim::SimRewardBackend reward({task}, {0.0, 0.6}, 4);

  SearchConfig cfg;
  cfg.n_candidates = 1;
  cfg.temperature_start = 1.0;
  cfg.seed = 1001;
  auto result = greedy_search(q, policy, reward, cfg);
  REQUIRE(result.ok());
  const ReasoningChain direct = scot::run_scot(q, policy, cfg);
  REQUIRE(result.value().best.chain.steps.size() == direct.steps.size());
  for (size_t i = 0; i < direct.steps.size(); ++i) {
    CHECK(result.value().best.chain.steps[i].text == direct.steps[i].text);
  }
  CHECK(result.value().stats.reward_calls ==
        static_cast<long long>(direct.steps.size()));  // scored but never used to choose
}

TEST_CASE("adversarial reward: greedy goes wrong where beam recovers") {
  // Hand-built two-level tree. At the root, the reward prefers the shiny
  // branch (0.9 vs 0.8), but everything under shiny is worthless while the
  // good branch concludes at 1.0. Greedy commits to shiny; a window-2 beam
  // keeps both and recovers.
  const std::string good = "Take the plain branch with real substance.";
  const std::string shiny = "Take the shiny branch that leads nowhere.";
  const std::string good_leaf = "Solid work pays off. The final answer is 7";
  const std::string shiny_leaf = "Glitter fades away. The final answer is 13";

  FnPolicyBackend policy([&](const PolicyRequest& req) -> BackendResult<PolicyResponse> {
    PolicyResponse r;
    if (req.history.empty()) {
      // lane temperatures: 0.0 (argmax -> shiny), 0.5 (other -> good)
      r.text = req.temperature == 0.0 ? shiny : good;
    } else if (req.history[0] == good) {
      r.text = good_leaf;
    } else {
      r.text = shiny_leaf;
    }
    return r;
  });
  TablePolicyReward reward({
      {{0, good}, 0.8},
      {{0, shiny}, 0.9},
      {{1, good_leaf}, 1.0},
      {{1, shiny_leaf}, 0.0},
  });

  Question q{"adv", "which branch?", {}, {}, {}};
  SearchConfig cfg;
  cfg.n_candidates = 2;
  cfg.beam_window = 2;
  cfg.max_steps = 4;

  auto greedy = greedy_search(q, policy, reward, cfg);
  REQUIRE(greedy.ok());
  CHECK(greedy.value().best.chain.final_answer == "13");  // locally optimal, globally wrong

  auto beam = beam_search(q, policy, reward, cfg);
  REQUIRE(beam.ok());
  CHECK(beam.value().best.chain.final_answer == "7");
  CHECK(beam.value().best.path_score == doctest::Approx(0.9));  // (0.8 + 1.0) / 2
}

TEST_CASE("beam degenerate window=1 candidates=1 equals run_scot") {
  const auto task = sim::generate_tasks(1, 2, 3, 73).at(0);
  const Question q = sim::question_for(task);
  sim::SimPolicyBackend policy({task}, {0.0, 0.6});
  sim::SimRewardBackend reward({task}, {0.0, 0.6}, 5);

  SearchConfig cfg;
  cfg.n_candidates = 1;
  cfg.beam_window = 1;
  cfg.temperature_start = 1.0;
  cfg.seed = 2002;
  auto result = beam_search(q, policy, reward, cfg);
  REQUIRE(result.ok());
  const ReasoningChain direct = scot::run_scot(q, policy, cfg);
  REQUIRE(result.value().best.chain.steps.size() == direct.steps.size());
  for (size_t i = 0; i < direct.steps.size(); ++i) {
    CHECK(result.value().best.chain.steps[i].text == direct.steps[i].text);
  }
}

TEST_CASE("beam matches exhaustive enumeration on the oracle") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const auto task = sim::generate_tasks(1, 2, 3, 600 + seed).at(0);
    const Question q = sim::question_for(task);
    sim::SimPolicyBackend policy({task}, {0.0, 0.6});
    sim::SimRewardBackend reward({task}, {0.0, 0.6}, seed);

    SearchConfig cfg;
    cfg.n_candidates = 2;
    cfg.beam_window = 2;
    cfg.seed = seed;
    auto result = beam_search(q, policy, reward, cfg);
    REQUIRE(result.ok());
    auto truth = sim::brute_force_best(task, reward, Aggregation::Avg);
    REQUIRE(truth.ok());
    CHECK(result.value().best.chain.final_answer ==
          scot::extract_answer(task.node(truth.value().leaf_id).text));
  }
}

TEST_CASE("beam per-depth call counts stay within window x candidates") {
  const auto task = sim::generate_tasks(1, 3, 4, 74).at(0);
  const Question q = sim::question_for(task);
  sim::SimPolicyBackend policy({task}, {0.0, 0.6});
  sim::SimRewardBackend reward({task}, {0.0, 0.6}, 6);

  SearchConfig cfg;
  cfg.n_candidates = 2;
  cfg.beam_window = 3;
  cfg.temperature_start = 0.5;
  auto result = beam_search(q, policy, reward, cfg);
  REQUIRE(result.ok());
  for (const auto& d : result.value().stats.per_depth) {
    CHECK(d.policy_calls <= cfg.beam_window * cfg.n_candidates);
    CHECK(d.reward_calls == d.policy_calls);
  }
}

TEST_CASE("oracle optimality holds across seeds when the window covers the branching") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const auto task = sim::generate_tasks(1, 2, 3, 900 + seed).at(0);
    const Question q = sim::question_for(task);
    sim::SimPolicyBackend policy({task}, {0.0, 0.7});
    sim::SimRewardBackend reward({task}, {0.0, 0.7}, seed);
    SearchConfig cfg;
    cfg.n_candidates = 2;
    cfg.beam_window = 2;
    cfg.seed = seed;
    auto result = beam_search(q, policy, reward, cfg);
    REQUIRE(result.ok());
    CHECK(result.value().best.chain.final_answer == task.gold_answer);
  }
}

TEST_CASE("scored chain JSONL round-trips and records accounting") {
  ScoredChain sc;
  sc.chain = concluded_chain("q9", "4");
  sc.step_scores = scores_of({0.75});
  sc.path_score = 0.75;
  sc.aggregation = Aggregation::Avg;
  const auto j = to_json(sc);
  const ScoredChain parsed = scored_chain_from_json(j);
  CHECK(to_json(parsed).dump() == j.dump());

  SearchStats stats;
  stats.policy_calls = 5;
  stats.reward_calls = 4;
  stats.gen_units = 123;
  stats.per_depth = {{2, 2}, {3, 2}};
  const auto with = to_json_with_stats(sc, stats);
  CHECK(with.at("policy_calls") == 5);
  CHECK(with.at("per_depth").size() == 2);
}
