#include "atomcot/core_types.hpp"

#include <sstream>

#include "atomcot/expected.hpp"

namespace atomcot {

namespace {

void check_positive(std::vector<std::string>& out, const char* field, long long v) {
  if (v <= 0) {
    std::ostringstream os;
    os << field << " must be positive, got " << v;
    out.push_back(os.str());
  }
}

void check_unit_interval(std::vector<std::string>& out, const char* field, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << field << " must lie in [0,1], got " << v;
    out.push_back(os.str());
  }
}

}  // namespace

std::vector<std::string> validate_config(const SearchConfig& c) {
  std::vector<std::string> errors;
  check_positive(errors, "n_candidates", c.n_candidates);
  check_positive(errors, "beam_window", c.beam_window);
  check_positive(errors, "max_steps", c.max_steps);
  check_positive(errors, "max_length", c.max_length);
  check_positive(errors, "max_retries", c.max_retries);
  check_positive(errors, "parallelism", c.parallelism);
  check_unit_interval(errors, "jaccard_intra_threshold", c.jaccard_intra_threshold);
  check_unit_interval(errors, "jaccard_inter_threshold", c.jaccard_inter_threshold);
  if (!(c.temperature_start >= 0.0)) {
    errors.push_back("temperature_start must be >= 0");
  }
  if (!(c.temperature_increment >= 0.0)) {
    errors.push_back("temperature_increment must be >= 0");
  }
  if (!(c.temperature_cap >= c.temperature_start)) {
    errors.push_back("temperature_cap must be >= temperature_start");
  }
  return errors;
}

const char* to_string(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::Quick: return "Quick";
    case SearchStrategy::MajorityVoting: return "MajorityVoting";
    case SearchStrategy::BestOfN: return "BestOfN";
    case SearchStrategy::Greedy: return "Greedy";
    case SearchStrategy::BeamSearch: return "BeamSearch";
  }
  return "Quick";
}

const char* to_string(Aggregation a) {
  switch (a) {
    case Aggregation::Min: return "Min";
    case Aggregation::Last: return "Last";
    case Aggregation::Avg: return "Avg";
  }
  return "Avg";
}

const char* to_string(TerminationKind k) {
  switch (k) {
    case TerminationKind::Concluded: return "Concluded";
    case TerminationKind::MaxStepsReached: return "MaxStepsReached";
    case TerminationKind::Aborted: return "Aborted";
  }
  return "Aborted";
}

std::optional<SearchStrategy> strategy_from_string(const std::string& s) {
  if (s == "Quick" || s == "quick") return SearchStrategy::Quick;
  if (s == "MajorityVoting" || s == "vote") return SearchStrategy::MajorityVoting;
  if (s == "BestOfN" || s == "bon") return SearchStrategy::BestOfN;
  if (s == "Greedy" || s == "greedy") return SearchStrategy::Greedy;
  if (s == "BeamSearch" || s == "beam") return SearchStrategy::BeamSearch;
  return std::nullopt;
}

std::optional<Aggregation> aggregation_from_string(const std::string& s) {
  if (s == "Min" || s == "min") return Aggregation::Min;
  if (s == "Last" || s == "last") return Aggregation::Last;
  if (s == "Avg" || s == "avg") return Aggregation::Avg;
  return std::nullopt;
}

std::optional<TerminationKind> termination_kind_from_string(const std::string& s) {
  if (s == "Concluded") return TerminationKind::Concluded;
  if (s == "MaxStepsReached") return TerminationKind::MaxStepsReached;
  if (s == "Aborted") return TerminationKind::Aborted;
  return std::nullopt;
}

const char* to_string(BackendErrorKind k) {
  switch (k) {
    case BackendErrorKind::Transport: return "Transport";
    case BackendErrorKind::Refusal: return "Refusal";
    case BackendErrorKind::EmptyCompletion: return "EmptyCompletion";
    case BackendErrorKind::MalformedScore: return "MalformedScore";
  }
  return "Transport";
}

const char* to_string(EngineErrorKind k) {
  switch (k) {
    case EngineErrorKind::BadInput: return "BadInput";
    case EngineErrorKind::BackendFailure: return "BackendFailure";
    case EngineErrorKind::RetriesExhausted: return "RetriesExhausted";
    case EngineErrorKind::EmptyScores: return "EmptyScores";
    case EngineErrorKind::NoConcludedChains: return "NoConcludedChains";
    case EngineErrorKind::AllRolloutsAborted: return "AllRolloutsAborted";
    case EngineErrorKind::DeadEnd: return "DeadEnd";
    case EngineErrorKind::MissingGold: return "MissingGold";
    case EngineErrorKind::NotConcluded: return "NotConcluded";
    case EngineErrorKind::UnparsableAction: return "UnparsableAction";
    case EngineErrorKind::SegmentationFailure: return "SegmentationFailure";
    case EngineErrorKind::TreeTooLarge: return "TreeTooLarge";
  }
  return "BadInput";
}

}  // namespace atomcot
