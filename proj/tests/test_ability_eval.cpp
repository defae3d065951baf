#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "atomcot/ability_eval.hpp"
#include "atomcot/scot_engine.hpp"
#include "atomcot/seeding.hpp"
#include "atomcot/sim_env.hpp"
#include "test_helpers.hpp"

using namespace atomcot;
using namespace atomcot::eval;
using atomcot::testing::ScriptedPolicyBackend;

namespace {

AtomicStep step_with(const std::string& text) {
  AtomicStep s;
  s.index = 0;
  s.text = text;
  return s;
}

}  // namespace

TEST_CASE("keyword classifier matches the stock taxonomy") {
  const auto taxonomy = AbilityTaxonomy::defaults();
  CHECK(classify_step(step_with("The image shows a right triangle with legs 3 and 4."),
                      taxonomy) == "Image Description");
  CHECK(classify_step(step_with("Let x denote the unknown side."), taxonomy) ==
        "Variable Definition");
  CHECK(classify_step(step_with("qwertyuiop"), taxonomy) == "Unclassified");
  CHECK(classify_step(step_with("Calculate the sum of 3 and 4 to obtain 7."), taxonomy) ==
        "Calculation");
  CHECK(classify_step(step_with("We conclude here. The final answer is 12."), taxonomy) ==
        "Conclusion Drawing");
  // token-boundary matching: "complete" must not trigger the "let" pattern
  CHECK(classify_step(step_with("complete nonsense words"), taxonomy) == "Unclassified");
}

TEST_CASE("taxonomy validation enforces unique names and the reserved bucket") {
  AbilityTaxonomy t;
  t.categories = {{"A", "", {"a"}}, {"A", "", {"b"}}};
  auto errors = t.validate_and_fix();
  REQUIRE_FALSE(errors.empty());

  AbilityTaxonomy ok;
  ok.categories = {{"A", "", {"a"}}};
  errors = ok.validate_and_fix();
  CHECK(errors.empty());
  CHECK(ok.has_category(kUnclassified));  // appended when missing
}

TEST_CASE("taxonomy file round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "atomcot_taxonomy_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "taxonomy.json";
  const auto t = AbilityTaxonomy::defaults();
  t.save(path);
  const auto loaded = AbilityTaxonomy::load(path);
  REQUIRE(loaded.categories.size() == t.categories.size());
  CHECK(loaded.categories[0].name == t.categories[0].name);
  CHECK(loaded.categories[0].patterns == t.categories[0].patterns);
}

TEST_CASE("classifier backend wins when it names a category, else keywords") {
  const auto taxonomy = AbilityTaxonomy::defaults();
  const TemplateStore templates = TemplateStore::builtin();

  ScriptedPolicyBackend naming({"Calculation"});
  CHECK(classify_step(step_with("Let x denote the side."), taxonomy, &naming, &templates) ==
        "Calculation");

  ScriptedPolicyBackend garbage({"I refuse to say."});
  CHECK(classify_step(step_with("Let x denote the side."), taxonomy, &garbage, &templates) ==
        "Variable Definition");
}

TEST_CASE("step_utilization counts correct continuations") {
  // Ten continuations, each one step; exactly three answer with the gold.
  std::vector<std::string> script;
  for (int i = 0; i < 10; ++i) {
    script.push_back(i % 3 == 0 ? "The final answer is 6" : "The final answer is 5");
  }
  ScriptedPolicyBackend policy(script);
  Question q{"uq", "What is 2 times 3?", {}, std::string("6"), {}};
  std::vector<AtomicStep> prefix{step_with("Verify the factors 2 and 3.")};
  SearchConfig cfg;
  const auto taxonomy = AbilityTaxonomy::defaults();
  std::vector<RolloutLog> log;
  auto record = step_utilization(q, prefix, policy, 10, "6", cfg, &taxonomy, &log);
  REQUIRE(record.ok());
  CHECK(record.value().rollouts == 10);
  CHECK(record.value().correct_count == 4);  // indices 0,3,6,9
  CHECK(record.value().rate == doctest::Approx(0.4));
  CHECK(record.value().ability_of_last_step == "Verification");
  CHECK(log.size() == 10);

  // the log alone recomputes the rate
  int correct = 0;
  for (const auto& entry : log) correct += entry.correct ? 1 : 0;
  CHECK(correct == record.value().correct_count);
}

TEST_CASE("perfect policy utilizes every on-path prefix at rate 1") {
  const auto task = sim::generate_tasks(1, 2, 3, 50).at(0);
  sim::SimPolicyBackend policy({task}, {0.0, 1.0});
  const Question q = sim::question_for(task);
  SearchConfig cfg;
  cfg.temperature_start = 1.0;
  std::vector<AtomicStep> prefix;
  AtomicStep s;
  s.index = 0;
  s.text = task.node(task.correct_path[1]).text;
  prefix.push_back(s);
  auto record = step_utilization(q, prefix, policy, 8, task.gold_answer, cfg);
  REQUIRE(record.ok());
  CHECK(record.value().rate == 1.0);
}

TEST_CASE("step_utilization rejects bad inputs") {
  ScriptedPolicyBackend policy({"The final answer is 1"});
  Question q{"uq", "t", {}, std::string("1"), {}};
  SearchConfig cfg;
  auto err = step_utilization(q, {}, policy, 0, "1", cfg);
  REQUIRE_FALSE(err.ok());
  CHECK(err.error().kind == EngineErrorKind::BadInput);
  err = step_utilization(q, {}, policy, 3, "", cfg);
  REQUIRE_FALSE(err.ok());
  CHECK(err.error().kind == EngineErrorKind::MissingGold);
}

TEST_CASE("ability_scores averages per category") {
  AbilityTaxonomy taxonomy;
  taxonomy.categories = {{"A", "", {}}, {"B", "", {}}};
  taxonomy.validate_and_fix();
  std::vector<UtilizationRecord> records{
      {"q1", 1, 10, 2, 0.2, "A"},
      {"q2", 1, 10, 4, 0.4, "A"},
      {"q3", 2, 10, 7, 0.7, "B"},
  };
  auto scores = ability_scores(records, taxonomy);
  REQUIRE(scores.ok());
  REQUIRE(scores.value().size() == 3);  // A, B, Unclassified
  CHECK(scores.value()[0].category == "A");
  CHECK(scores.value()[0].member_count == 2);
  CHECK(*scores.value()[0].score == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(scores.value()[1].member_count == 1);
  CHECK(*scores.value()[1].score == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(scores.value()[2].member_count == 0);
  CHECK_FALSE(scores.value()[2].score.has_value());
}

TEST_CASE("ability_scores rejects unknown categories") {
  AbilityTaxonomy taxonomy;
  taxonomy.categories = {{"A", "", {}}};
  taxonomy.validate_and_fix();
  std::vector<UtilizationRecord> records{{"q", 1, 10, 5, 0.5, "NoSuchCategory"}};
  auto err = ability_scores(records, taxonomy);
  REQUIRE_FALSE(err.ok());
  CHECK(err.error().kind == EngineErrorKind::BadInput);
}

TEST_CASE("recomputing a score from raw records agrees to 1e-12") {
  AbilityTaxonomy taxonomy;
  taxonomy.categories = {{"A", "", {}}};
  taxonomy.validate_and_fix();
  Rng rng(7001);
  std::vector<UtilizationRecord> records;
  for (int i = 0; i < 100; ++i) {
    const int m = 1 + static_cast<int>(rng.below(12));
    const int correct = static_cast<int>(rng.below(static_cast<uint64_t>(m) + 1));
    records.push_back({"q" + std::to_string(i), 1, m, correct,
                       static_cast<double>(correct) / m, "A"});
  }
  auto scores = ability_scores(records, taxonomy);
  REQUIRE(scores.ok());
  double sum = 0.0;
  for (const auto& r : records) sum += r.rate;
  CHECK(std::fabs(*scores.value()[0].score - sum / records.size()) < 1e-12);
}

TEST_CASE("behavior_distribution counts fractions that sum to one") {
  AbilityTaxonomy taxonomy;
  taxonomy.categories = {{"A", "", {"alpha"}}, {"B", "", {"beta"}}, {"C", "", {"gamma"}}};
  taxonomy.validate_and_fix();

  ReasoningChain chain;
  chain.question_id = "q";
  const std::vector<std::string> texts{"alpha one here", "alpha two here", "beta thing",
                                       "gamma thing"};
  for (size_t i = 0; i < texts.size(); ++i) {
    AtomicStep s;
    s.index = static_cast<int>(i);
    s.text = texts[i];
    chain.steps.push_back(s);
  }
  chain.termination = Termination::max_steps();

  std::vector<ReasoningChain> chains{chain};
  const auto dist = behavior_distribution(chains, taxonomy);
  REQUIRE(dist.size() == 3);
  CHECK(dist[0].first == "A");
  CHECK(dist[0].second == doctest::Approx(0.5));
  CHECK(dist[1].second == doctest::Approx(0.25));
  CHECK(dist[2].second == doctest::Approx(0.25));

  double total = 0.0;
  for (const auto& [_, f] : dist) total += f;
  CHECK(std::fabs(total - 1.0) < 1e-9);

  CHECK(behavior_distribution({}, taxonomy).empty());

  ReasoningChain odd;
  odd.question_id = "q2";
  AtomicStep s;
  s.index = 0;
  s.text = "zzz nothing matches";
  odd.steps.push_back(s);
  odd.termination = Termination::max_steps();
  std::vector<ReasoningChain> odd_chains{odd};
  const auto unall = behavior_distribution(odd_chains, taxonomy);
  REQUIRE(unall.size() == 1);
  CHECK(unall[0].first == kUnclassified);
  CHECK(unall[0].second == 1.0);
}

TEST_CASE("distribution over generated sim chains sums to one") {
  const auto tasks = sim::generate_tasks(12, 2, 3, 2).at(0);
  const auto batch = sim::generate_tasks(12, 2, 3, 2);
  sim::SimPolicyBackend policy(batch, {0.0, 1.0});
  SearchConfig cfg;
  std::vector<ReasoningChain> chains;
  for (const auto& task : batch) {
    chains.push_back(scot::run_scot(sim::question_for(task), policy, cfg));
  }
  const auto dist = behavior_distribution(chains, AbilityTaxonomy::defaults());
  double total = 0.0;
  for (const auto& [_, f] : dist) total += f;
  CHECK(std::fabs(total - 1.0) < 1e-9);
  REQUIRE(dist.size() >= 3);
}

TEST_CASE("utilization record JSONL round-trips") {
  UtilizationRecord r{"q", 2, 8, 5, 0.625, "Calculation"};
  const auto j = to_json(r);
  const auto parsed = utilization_record_from_json(j);
  CHECK(to_json(parsed).dump() == j.dump());
}
