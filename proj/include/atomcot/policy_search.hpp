#pragma once

/**
 * Reward-guided search over atomic steps.
 *
 * Path-wise strategies sample whole rollouts and pick among them (majority
 * voting, best-of-n); step-wise strategies expand candidates per step and
 * prune (greedy, beam). Candidate `i` at depth `d` samples at temperature
 * start + i * increment (capped) with seed hash(config.seed, question.id,
 * d, i), so whole searches replay from one root seed.
 *
 * Beam items are ranked by the average of their step scores: whole-path
 * aggregators do not apply to partial paths and the average is
 * length-neutral, so a short concluded path gets no free advantage.
 * Concluded items stay in the frontier and keep competing by score.
 */

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "atomcot/backends.hpp"
#include "atomcot/core_types.hpp"
#include "atomcot/expected.hpp"
#include "atomcot/scot_engine.hpp"

namespace atomcot::search {

struct ScoredChain {
  ReasoningChain chain;
  std::vector<StepScore> step_scores;  // one per step
  double path_score = 0.0;             // aggregation applied to step_scores
  Aggregation aggregation = Aggregation::Avg;
};

struct BeamItem {
  std::vector<AtomicStep> steps;
  std::vector<StepScore> scores;
  double cumulative = 0.0;  // average of step scores so far
  bool alive = true;        // not yet concluded
  std::optional<std::string> answer;
};

struct DepthCounts {
  long long policy_calls = 0;
  long long reward_calls = 0;
};

struct SearchStats {
  long long policy_calls = 0;
  long long reward_calls = 0;
  long long gen_units = 0;
  std::vector<DepthCounts> per_depth;  // filled by step-wise strategies
};

struct SearchResult {
  ScoredChain best;
  SearchStats stats;
};

/// Min -> worst step, Last -> final step, Avg -> arithmetic mean.
EngineResult<double> aggregate_path(std::span<const StepScore> scores, Aggregation method);

/// Config for rollout `index` of a path-wise strategy: index 0 keeps the
/// seed and temperature untouched, later rollouts derive their seed from
/// (config.seed, question.id, index) and start the temperature ladder
/// `index` rungs up.
SearchConfig rollout_config(const SearchConfig& base, const Question& question, int index);

/// Groups concluded chains by final answer and returns a copy of a
/// representative of the largest group; size ties fall to the group seen
/// first. Errors with NoConcludedChains when nothing concluded.
EngineResult<ReasoningChain> majority_vote(std::span<const ReasoningChain> chains);

/// As above, but size ties prefer the group whose best member has the
/// highest average step score, and that member represents the group.
EngineResult<ScoredChain> majority_vote(std::span<const ScoredChain> chains);

/// n_candidates independent rollouts; rollout i reuses config.seed when
/// i == 0 (so best_of_n with n = 1 equals run_scot) and a derived seed plus
/// the shifted temperature ladder otherwise. Every step of every surviving
/// rollout is scored; the rollout maximizing the configured aggregation wins,
/// ties going to the lowest index.
EngineResult<SearchResult> best_of_n(const Question& question, PolicyBackend& policy,
                                     RewardBackend& reward, const SearchConfig& config);

/// At each depth samples n_candidates steps, scores each, keeps the argmax.
EngineResult<SearchResult> greedy_search(const Question& question, PolicyBackend& policy,
                                         RewardBackend& reward, const SearchConfig& config);

/// Frontier of at most beam_window items; each expansion scores every
/// sampled candidate and the pooled items are cut back to the window by
/// cumulative score. Returns the best concluded item.
EngineResult<SearchResult> beam_search(const Question& question, PolicyBackend& policy,
                                       RewardBackend& reward, const SearchConfig& config);

nlohmann::json to_json(const ScoredChain& sc);
ScoredChain scored_chain_from_json(const nlohmann::json& j);

/// Scored-chain JSONL record with call accounting folded in.
nlohmann::json to_json_with_stats(const ScoredChain& sc, const SearchStats& stats);

}  // namespace atomcot::search
