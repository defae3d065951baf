#pragma once

/**
 * Shared domain vocabulary: questions, atomic steps, reasoning chains,
 * step scores, and the search configuration.
 *
 * All types here are plain values, immutable by convention after
 * construction, and safe to copy across threads.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace atomcot {

struct Question {
  std::string id;
  std::string text;
  std::optional<std::string> image_ref;  // passed through opaquely, never decoded
  std::optional<std::string> gold_answer;
  std::map<std::string, std::string> metadata;

  bool operator==(const Question&) const = default;
};

struct AtomicStep {
  int index = 0;
  std::string text;
  std::optional<std::string> behavior;  // ability label, filled by classification
  double temperature = 0.0;
  int retries = 0;  // anomaly-triggered regenerations consumed by this step

  bool operator==(const AtomicStep&) const = default;
};

enum class TerminationKind { Concluded, MaxStepsReached, Aborted };

struct Termination {
  TerminationKind kind = TerminationKind::Aborted;
  std::string reason;  // nonempty only for Aborted

  bool operator==(const Termination&) const = default;

  static Termination concluded() { return {TerminationKind::Concluded, ""}; }
  static Termination max_steps() { return {TerminationKind::MaxStepsReached, ""}; }
  static Termination aborted(std::string why) { return {TerminationKind::Aborted, std::move(why)}; }
};

struct ReasoningChain {
  std::string question_id;
  std::vector<AtomicStep> steps;
  std::optional<std::string> final_answer;  // present iff Concluded
  Termination termination = Termination::aborted("unset");
  long long token_count = 0;  // backend-reported tokens, or characters when unreported

  bool operator==(const ReasoningChain&) const = default;
};

struct StepScore {
  int step_index = 0;
  double value = 0.0;  // probability in [0,1] that the step is correct

  bool operator==(const StepScore&) const = default;
};

enum class SearchStrategy { Quick, MajorityVoting, BestOfN, Greedy, BeamSearch };
enum class Aggregation { Min, Last, Avg };

struct SearchConfig {
  SearchStrategy strategy = SearchStrategy::Quick;
  int n_candidates = 2;
  int beam_window = 3;
  Aggregation aggregation = Aggregation::Avg;
  int max_steps = 20;
  int max_length = 600;  // per-step character cap
  double jaccard_intra_threshold = 0.9;
  double jaccard_inter_threshold = 0.85;
  double temperature_start = 0.0;
  double temperature_increment = 0.5;
  double temperature_cap = 1.5;
  int max_retries = 3;
  uint64_t seed = 0;
  int parallelism = 1;

  bool operator==(const SearchConfig&) const = default;
};

/// Returns one message per violated invariant, each naming the offending
/// field. Empty result means the config is valid.
std::vector<std::string> validate_config(const SearchConfig& config);

const char* to_string(SearchStrategy s);
const char* to_string(Aggregation a);
const char* to_string(TerminationKind k);
std::optional<SearchStrategy> strategy_from_string(const std::string& s);
std::optional<Aggregation> aggregation_from_string(const std::string& s);
std::optional<TerminationKind> termination_kind_from_string(const std::string& s);

}  // namespace atomcot
