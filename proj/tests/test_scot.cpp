#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "atomcot/jsonl.hpp"
#include "atomcot/scot_engine.hpp"
#include "test_helpers.hpp"

using namespace atomcot;
using namespace atomcot::scot;
using atomcot::testing::ScriptedPolicyBackend;

namespace {

TokenSet tokens(std::initializer_list<const char*> list) {
  TokenSet out;
  for (const char* t : list) out.emplace_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

Question fixture_question() {
  Question q;
  q.id = "fx";
  q.text = "What is the area of a square with side 3?";
  q.gold_answer = "9";
  return q;
}

}  // namespace

TEST_CASE("tokenize_for_similarity") {
  CHECK(tokenize_for_similarity("The area is 6.") == tokens({"the", "area", "is", "6"}));
  CHECK(tokenize_for_similarity("").empty());
  CHECK(tokenize_for_similarity("AREA area") == tokens({"area"}));
  CHECK(tokenize_for_similarity("a-b, c!") == tokens({"a", "b", "c"}));
}

TEST_CASE("jaccard") {
  CHECK(jaccard(tokens({"a", "b", "c"}), tokens({"a", "b", "c"})) == 1.0);
  CHECK(jaccard(tokens({"a", "b"}), tokens({"c", "d"})) == 0.0);
  CHECK(jaccard(tokens({"a", "b"}), tokens({"b", "c"})) == doctest::Approx(1.0 / 3.0));
  CHECK(jaccard({}, {}) == 1.0);
  CHECK(jaccard(tokens({"a"}), {}) == 0.0);
}

TEST_CASE("detect_anomaly verdicts and priority") {
  SearchConfig cfg;

  SUBCASE("fresh short step with empty history") {
    const auto v = detect_anomaly("Compute 3 times 3.", std::span<const std::string>{}, cfg);
    CHECK(v.kind == AnomalyKind::None);
    CHECK_FALSE(v.evidence.has_value());
  }
  SUBCASE("empty and whitespace-only candidates") {
    const auto v = detect_anomaly("  \t ", std::span<const std::string>{}, cfg);
    CHECK(v.kind == AnomalyKind::Empty);
    CHECK(v.evidence.has_value());
  }
  SUBCASE("overlength boundary") {
    const std::string at_limit(static_cast<size_t>(cfg.max_length), 'x');
    CHECK(detect_anomaly(at_limit, std::span<const std::string>{}, cfg).kind ==
          AnomalyKind::None);
    const std::string over(static_cast<size_t>(cfg.max_length) + 1, 'x');
    const auto v = detect_anomaly(over, std::span<const std::string>{}, cfg);
    CHECK(v.kind == AnomalyKind::Overlength);
    CHECK(*v.evidence == doctest::Approx(cfg.max_length + 1));
  }
  SUBCASE("inter-step repetition against history") {
    const std::vector<std::string> history{"The square has side 3.", "So the area is 9."};
    const auto v = detect_anomaly("The square has side 3.", history, cfg);
    CHECK(v.kind == AnomalyKind::InterStepRepetition);
    CHECK(*v.evidence == doctest::Approx(1.0));
  }
  SUBCASE("intra-step repetition between sentences") {
    const auto v = detect_anomaly("The cat sat here. The cat sat here.",
                                  std::span<const std::string>{}, cfg);
    CHECK(v.kind == AnomalyKind::IntraStepRepetition);
    CHECK(*v.evidence == doctest::Approx(1.0));
  }
  SUBCASE("inter beats intra when both fire") {
    const std::vector<std::string> history{"Repeat me twice now."};
    const auto v = detect_anomaly("Repeat me twice now. Repeat me twice now.", history, cfg);
    CHECK(v.kind == AnomalyKind::InterStepRepetition);
  }
  SUBCASE("empty beats everything") {
    SearchConfig tight = cfg;
    tight.max_length = 1;
    const auto v = detect_anomaly("   ", std::span<const std::string>{}, tight);
    CHECK(v.kind == AnomalyKind::Empty);
  }
}

TEST_CASE("next_temperature follows the ladder and caps") {
  SearchConfig cfg;  // start 0, increment 0.5, cap 1.5
  LoopState state;
  state.retries_this_step = 0;
  CHECK(next_temperature(state, cfg) == 0.0);
  state.retries_this_step = 1;
  CHECK(next_temperature(state, cfg) == 0.5);
  state.retries_this_step = 5;
  CHECK(next_temperature(state, cfg) == 1.5);
}

TEST_CASE("extract_answer") {
  CHECK(extract_answer("Steps done. The final answer is 42.") == "42");
  CHECK(extract_answer("Answer: \\boxed{B}") == "b");
  CHECK_FALSE(extract_answer("let us continue reasoning").has_value());
  CHECK(extract_answer("Answer: 1. No wait. The final answer is 2.") == "2");
  CHECK(extract_answer("The final answer is $12$") == "12");
  CHECK(extract_answer("the FINAL ANSWER is  two  words ") == "two words");
  CHECK_FALSE(extract_answer("The final answer is ").has_value());
}

TEST_CASE("answers_match uses normalization and numeric tolerance") {
  CHECK(answers_match("42", " 42. "));
  CHECK(answers_match("0.5", "0.4999999999"));
  CHECK_FALSE(answers_match("0.5", "0.51"));
  CHECK(answers_match("\\boxed{B}", "b"));
  CHECK_FALSE(answers_match("cat", "dog"));
}

TEST_CASE("run_scot: clean scripted chain concludes") {
  ScriptedPolicyBackend policy({"Extract side length 3.", "Area equals 3 times 3 which is 9.",
                                "The final answer is 9"});
  SearchConfig cfg;
  Trace trace;
  const ReasoningChain chain = run_scot(fixture_question(), policy, cfg, {}, &trace);
  REQUIRE(chain.steps.size() == 3);
  CHECK(chain.termination.kind == TerminationKind::Concluded);
  CHECK(chain.final_answer == "9");
  CHECK(chain.steps[0].index == 0);
  CHECK(chain.steps[2].index == 2);
  CHECK(chain.steps[2].retries == 0);
  CHECK(trace.size() == 3);
  // character accounting: the mock reports no usage
  long long chars = 0;
  for (const auto& e : trace) chars += static_cast<long long>(e.candidate.size());
  CHECK(chain.token_count == chars);
}

TEST_CASE("run_scot: a looping mock aborts with the temperature ladder") {
  ScriptedPolicyBackend policy({"First step about squares.", "First step about squares.",
                                "First step about squares.", "First step about squares."});
  SearchConfig cfg;
  cfg.max_retries = 2;
  Trace trace;
  const ReasoningChain chain = run_scot(fixture_question(), policy, cfg, {}, &trace);
  CHECK(chain.termination.kind == TerminationKind::Aborted);
  CHECK(chain.steps.size() == 1);  // the first acceptance; step 2 never lands
  REQUIRE(trace.size() == 4);      // 1 accepted + 3 attempts on step 2
  CHECK(trace[1].temperature == 0.0);
  CHECK(trace[2].temperature == 0.5);
  CHECK(trace[3].temperature == 1.0);
  CHECK(trace[1].verdict.kind == AnomalyKind::InterStepRepetition);
  CHECK(policy.calls_made() == 4);
}

TEST_CASE("run_scot: max_steps boundary") {
  ScriptedPolicyBackend policy({"Organize what the question gives us."});
  SearchConfig cfg;
  cfg.max_steps = 1;
  const ReasoningChain chain = run_scot(fixture_question(), policy, cfg);
  CHECK(chain.termination.kind == TerminationKind::MaxStepsReached);
  CHECK(chain.steps.size() == 1);
  CHECK_FALSE(chain.final_answer.has_value());
}

TEST_CASE("run_scot: empty completions are retried on the ladder") {
  ScriptedPolicyBackend policy({"", "   ", "A usable first step.", "The final answer is 1"});
  SearchConfig cfg;
  Trace trace;
  const ReasoningChain chain = run_scot(fixture_question(), policy, cfg, {}, &trace);
  CHECK(chain.termination.kind == TerminationKind::Concluded);
  REQUIRE(chain.steps.size() == 2);
  CHECK(chain.steps[0].retries == 2);
  CHECK(chain.steps[0].temperature == doctest::Approx(1.0));
  CHECK(trace[0].verdict.kind == AnomalyKind::Empty);
  CHECK(trace[1].verdict.kind == AnomalyKind::Empty);
}

TEST_CASE("accepted steps never violate the anomaly filter") {
  ScriptedPolicyBackend policy({"Extract the given numbers.", "Multiply them together.",
                                "Check the product once.", "The final answer is 9"});
  SearchConfig cfg;
  const ReasoningChain chain = run_scot(fixture_question(), policy, cfg);
  std::vector<std::string> history;
  for (const auto& step : chain.steps) {
    CHECK(detect_anomaly(step.text, history, cfg).kind == AnomalyKind::None);
    history.push_back(step.text);
  }
}

TEST_CASE("temperature sequence within a step's retries is non-decreasing and capped") {
  ScriptedPolicyBackend policy({"Alpha step one.", "Alpha step one.", "Alpha step one.",
                                "Alpha step one.", "Alpha step one.", "Alpha step one.",
                                "Alpha step one.", "Beta step two.", "The final answer is 3"});
  SearchConfig cfg;
  cfg.max_retries = 6;
  Trace trace;
  run_scot(fixture_question(), policy, cfg, {}, &trace);
  double last = -1.0;
  for (const auto& e : trace) {
    if (e.round == 1) {
      CHECK(e.temperature >= last);
      CHECK(e.temperature <= cfg.temperature_cap);
      last = e.temperature;
    }
  }
  CHECK(last == cfg.temperature_cap);
}

TEST_CASE("run_scot with a preloaded history continues from it") {
  ScriptedPolicyBackend policy({"The final answer is 9"});
  SearchConfig cfg;
  std::vector<AtomicStep> prefix;
  AtomicStep s;
  s.index = 0;
  s.text = "Extract side length 3.";
  prefix.push_back(s);
  const ReasoningChain chain = run_scot(fixture_question(), policy, cfg, prefix);
  REQUIRE(chain.steps.size() == 2);
  CHECK(chain.steps[0].text == "Extract side length 3.");
  CHECK(chain.termination.kind == TerminationKind::Concluded);
}
