#pragma once

/**
 * The multi-round self-structured chain-of-thought loop.
 *
 * Each round asks the policy for exactly one atomic step, screens it with the
 * rule-based anomaly filter (empty / overlength / inter-step repetition /
 * intra-step repetition, checked in that priority order), and on rejection
 * regenerates the step with the temperature ladder
 *
 *     temperature(retries) = min(start + retries * increment, cap)
 *
 * Retries are counted per step and reset on acceptance. The loop concludes
 * when an accepted step carries an extractable final answer, stops at
 * max_steps otherwise, and aborts when a single step exhausts max_retries or
 * the backend fails.
 */

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atomcot/backends.hpp"
#include "atomcot/core_types.hpp"
#include "atomcot/expected.hpp"

namespace atomcot::scot {

/// Lowercased, punctuation-stripped, whitespace-split unique tokens,
/// sorted for cheap set arithmetic.
using TokenSet = std::vector<std::string>;

TokenSet tokenize_for_similarity(std::string_view text);

/// |a n b| / |a u b|; two empty sets count as identical (1.0).
double jaccard(const TokenSet& a, const TokenSet& b);

enum class AnomalyKind { None, IntraStepRepetition, InterStepRepetition, Overlength, Empty };

struct AnomalyVerdict {
  AnomalyKind kind = AnomalyKind::None;
  std::optional<double> evidence;  // similarity or length; absent only for None
};

const char* to_string(AnomalyKind k);

/// First matching verdict in priority order:
/// Empty > Overlength > InterStepRepetition > IntraStepRepetition > None.
/// Inter-step repetition compares the candidate against every history step;
/// intra-step repetition compares sentence segments of the candidate
/// (split on . ! ?) against each other.
AnomalyVerdict detect_anomaly(const std::string& candidate,
                              std::span<const std::string> history,
                              const SearchConfig& config);
AnomalyVerdict detect_anomaly(const std::string& candidate,
                              std::span<const AtomicStep> history,
                              const SearchConfig& config);

struct LoopState {
  std::vector<AtomicStep> history;
  int retries_this_step = 0;
  double current_temperature = 0.0;
  int rounds_elapsed = 0;
};

double next_temperature(const LoopState& state, const SearchConfig& config);

/// Looks for the markers "The final answer is" / "Answer:" (case-insensitive,
/// last occurrence wins) and returns the normalized answer text after it.
std::optional<std::string> extract_answer(std::string_view text);

/// Trims whitespace and one trailing period, strips "$" and a \boxed{...}
/// wrapper, collapses internal whitespace, lowercases.
std::string normalize_answer(std::string_view raw);

/// Normalized string equality, or numeric equality at 1e-6 relative
/// tolerance when both sides parse as numbers.
bool answers_match(const std::string& a, const std::string& b);

struct TraceEvent {
  int round = 0;
  int attempt = 0;  // 0 = first try, >0 = retries
  double temperature = 0.0;
  std::string candidate;
  AnomalyVerdict verdict;
  bool accepted = false;
};

using Trace = std::vector<TraceEvent>;

/// Accumulates backend usage across one generation or search.
struct CallStats {
  long long policy_calls = 0;
  long long reward_calls = 0;
  long long gen_units = 0;
};

/// One accepted atomic step from the policy, retrying anomalous candidates
/// with the temperature ladder. `lane` shifts the ladder so sibling
/// candidates in a search sample at different temperatures; `round` is the
/// step position (seeds derive from config.seed, question id, round, lane,
/// attempt). The step's index is set to history.size().
EngineResult<AtomicStep> sample_step(const Question& question,
                                     std::span<const AtomicStep> history, int lane,
                                     PolicyBackend& policy, const SearchConfig& config,
                                     int round, CallStats& stats, Trace* trace = nullptr);

/// Runs the full loop from an optional preloaded history. With a
/// deterministic backend and fixed config.seed the result is
/// bit-reproducible. max_steps caps the total chain length including the
/// preloaded prefix.
ReasoningChain run_scot(const Question& question, PolicyBackend& policy,
                        const SearchConfig& config,
                        std::span<const AtomicStep> initial_history = {},
                        Trace* trace = nullptr, CallStats* stats = nullptr);

}  // namespace atomcot::scot
