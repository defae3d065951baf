#include "atomcot/policy_search.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "atomcot/jsonl.hpp"
#include "atomcot/seeding.hpp"

namespace atomcot::search {

namespace {

using scot::CallStats;

double average(std::span<const StepScore> scores) {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : scores) sum += s.value;
  return sum / static_cast<double>(scores.size());
}

EngineResult<double> score_candidate(RewardBackend& reward, const Question& question,
                                     std::span<const AtomicStep> history,
                                     const std::string& candidate, CallStats& stats) {
  RewardRequest req;
  req.question_text = question.text;
  req.history.reserve(history.size());
  for (const auto& s : history) req.history.push_back(s.text);
  req.candidate = candidate;
  stats.reward_calls += 1;
  auto result = reward.score_step(req);
  if (!result.ok()) {
    return EngineError{EngineErrorKind::BackendFailure,
                       std::string(to_string(result.error().kind)) + ": " +
                           result.error().message};
  }
  return result.value().value;
}

}  // namespace

SearchConfig rollout_config(const SearchConfig& base, const Question& question, int index) {
  SearchConfig cfg = base;
  if (index > 0) {
    cfg.seed = derive_seed(base.seed, question.id, static_cast<uint64_t>(index));
    cfg.temperature_start =
        std::min(base.temperature_start + index * base.temperature_increment,
                 base.temperature_cap);
  }
  return cfg;
}

EngineResult<double> aggregate_path(std::span<const StepScore> scores, Aggregation method) {
  if (scores.empty()) {
    return EngineError{EngineErrorKind::EmptyScores, "cannot aggregate an empty score list"};
  }
  switch (method) {
    case Aggregation::Min: {
      double best = scores[0].value;
      for (const auto& s : scores) best = std::min(best, s.value);
      return best;
    }
    case Aggregation::Last: {
      const StepScore* last = &scores[0];
      for (const auto& s : scores) {
        if (s.step_index >= last->step_index) last = &s;
      }
      return last->value;
    }
    case Aggregation::Avg:
      return average(scores);
  }
  return EngineError{EngineErrorKind::BadInput, "unknown aggregation"};
}

namespace {

// Indices of concluded chains grouped by final answer, in first-seen order.
template <typename GetChain, typename Range>
std::vector<std::vector<size_t>> concluded_groups(const Range& chains, GetChain get) {
  std::vector<std::vector<size_t>> groups;
  std::map<std::string, size_t> by_answer;
  for (size_t i = 0; i < chains.size(); ++i) {
    const ReasoningChain& c = get(chains[i]);
    if (c.termination.kind != TerminationKind::Concluded || !c.final_answer) continue;
    auto [it, inserted] = by_answer.emplace(*c.final_answer, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

}  // namespace

EngineResult<ReasoningChain> majority_vote(std::span<const ReasoningChain> chains) {
  const auto groups =
      concluded_groups(chains, [](const ReasoningChain& c) -> const ReasoningChain& { return c; });
  if (groups.empty()) {
    return EngineError{EngineErrorKind::NoConcludedChains, "no concluded chains to vote over"};
  }
  size_t winner = 0;
  for (size_t g = 1; g < groups.size(); ++g) {
    if (groups[g].size() > groups[winner].size()) winner = g;
  }
  return chains[groups[winner].front()];
}

EngineResult<ScoredChain> majority_vote(std::span<const ScoredChain> chains) {
  const auto groups = concluded_groups(
      chains, [](const ScoredChain& c) -> const ReasoningChain& { return c.chain; });
  if (groups.empty()) {
    return EngineError{EngineErrorKind::NoConcludedChains, "no concluded chains to vote over"};
  }
  auto best_member = [&](const std::vector<size_t>& group) {
    size_t best = group.front();
    for (size_t idx : group) {
      if (average(chains[idx].step_scores) > average(chains[best].step_scores)) best = idx;
    }
    return best;
  };
  size_t winner = 0;
  for (size_t g = 1; g < groups.size(); ++g) {
    if (groups[g].size() > groups[winner].size()) {
      winner = g;
    } else if (groups[g].size() == groups[winner].size() &&
               average(chains[best_member(groups[g])].step_scores) >
                   average(chains[best_member(groups[winner])].step_scores)) {
      winner = g;
    }
  }
  return chains[best_member(groups[winner])];
}

EngineResult<SearchResult> best_of_n(const Question& question, PolicyBackend& policy,
                                     RewardBackend& reward, const SearchConfig& config) {
  if (config.n_candidates < 1) {
    return EngineError{EngineErrorKind::BadInput, "n_candidates must be >= 1"};
  }

  SearchStats stats;
  CallStats usage;
  std::vector<ReasoningChain> rollouts;
  rollouts.reserve(static_cast<size_t>(config.n_candidates));
  for (int i = 0; i < config.n_candidates; ++i) {
    const SearchConfig cfg = rollout_config(config, question, i);
    rollouts.push_back(scot::run_scot(question, policy, cfg, {}, nullptr, &usage));
  }

  std::optional<size_t> best;
  double best_score = 0.0;
  std::vector<std::vector<StepScore>> all_scores(rollouts.size());
  for (size_t i = 0; i < rollouts.size(); ++i) {
    const ReasoningChain& chain = rollouts[i];
    if (chain.termination.kind == TerminationKind::Aborted || chain.steps.empty()) continue;
    auto& scores = all_scores[i];
    scores.reserve(chain.steps.size());
    for (const auto& step : chain.steps) {
      std::span<const AtomicStep> prefix(chain.steps.data(), static_cast<size_t>(step.index));
      auto value = score_candidate(reward, question, prefix, step.text, usage);
      if (!value.ok()) return value.error();
      scores.push_back(StepScore{step.index, value.value()});
    }
    auto total = aggregate_path(scores, config.aggregation);
    if (!total.ok()) return total.error();
    if (!best || total.value() > best_score) {
      best = i;
      best_score = total.value();
    }
  }
  if (!best) {
    return EngineError{EngineErrorKind::AllRolloutsAborted, "every rollout aborted"};
  }

  stats.policy_calls = usage.policy_calls;
  stats.reward_calls = usage.reward_calls;
  stats.gen_units = usage.gen_units;

  SearchResult result;
  result.best.chain = rollouts[*best];
  result.best.step_scores = all_scores[*best];
  result.best.path_score = best_score;
  result.best.aggregation = config.aggregation;
  result.stats = std::move(stats);
  return result;
}

EngineResult<SearchResult> greedy_search(const Question& question, PolicyBackend& policy,
                                         RewardBackend& reward, const SearchConfig& config) {
  if (config.n_candidates < 1) {
    return EngineError{EngineErrorKind::BadInput, "n_candidates must be >= 1"};
  }

  CallStats usage;
  SearchStats stats;
  std::vector<AtomicStep> steps;
  std::vector<StepScore> scores;
  std::optional<std::string> answer;

  for (int depth = 0; depth < config.max_steps && !answer; ++depth) {
    const long long policy_before = usage.policy_calls;
    const long long reward_before = usage.reward_calls;

    std::optional<AtomicStep> chosen;
    double chosen_score = 0.0;
    for (int lane = 0; lane < config.n_candidates; ++lane) {
      auto candidate = scot::sample_step(question, steps, lane, policy, config, depth, usage);
      if (!candidate.ok()) {
        if (candidate.error().kind == EngineErrorKind::RetriesExhausted) continue;
        return candidate.error();
      }
      auto value = score_candidate(reward, question, steps, candidate.value().text, usage);
      if (!value.ok()) return value.error();
      if (!chosen || value.value() > chosen_score) {
        chosen = candidate.value();
        chosen_score = value.value();
      }
    }
    stats.per_depth.push_back(
        {usage.policy_calls - policy_before, usage.reward_calls - reward_before});
    if (!chosen) {
      return EngineError{EngineErrorKind::DeadEnd,
                         "every candidate at depth " + std::to_string(depth) + " was anomalous"};
    }
    steps.push_back(*chosen);
    scores.push_back(StepScore{chosen->index, chosen_score});
    answer = scot::extract_answer(chosen->text);
  }

  stats.policy_calls = usage.policy_calls;
  stats.reward_calls = usage.reward_calls;
  stats.gen_units = usage.gen_units;

  SearchResult result;
  result.best.chain.question_id = question.id;
  result.best.chain.steps = std::move(steps);
  result.best.chain.final_answer = answer;
  result.best.chain.termination =
      answer ? Termination::concluded() : Termination::max_steps();
  result.best.chain.token_count = usage.gen_units;
  result.best.step_scores = std::move(scores);
  result.best.aggregation = config.aggregation;
  auto total = aggregate_path(result.best.step_scores, config.aggregation);
  if (!total.ok()) return total.error();
  result.best.path_score = total.value();
  result.stats = std::move(stats);
  return result;
}

EngineResult<SearchResult> beam_search(const Question& question, PolicyBackend& policy,
                                       RewardBackend& reward, const SearchConfig& config) {
  if (config.n_candidates < 1 || config.beam_window < 1) {
    return EngineError{EngineErrorKind::BadInput,
                       "beam_window and n_candidates must be >= 1"};
  }

  CallStats usage;
  SearchStats stats;
  std::vector<BeamItem> frontier{BeamItem{}};

  for (int depth = 0; depth < config.max_steps; ++depth) {
    const bool any_alive =
        std::any_of(frontier.begin(), frontier.end(), [](const BeamItem& b) { return b.alive; });
    if (!any_alive) break;

    const long long policy_before = usage.policy_calls;
    const long long reward_before = usage.reward_calls;

    std::vector<BeamItem> pool;
    for (const auto& item : frontier) {
      if (!item.alive) pool.push_back(item);  // concluded items keep competing
    }
    for (const auto& item : frontier) {
      if (!item.alive) continue;
      for (int lane = 0; lane < config.n_candidates; ++lane) {
        auto candidate =
            scot::sample_step(question, item.steps, lane, policy, config, depth, usage);
        if (!candidate.ok()) {
          if (candidate.error().kind == EngineErrorKind::RetriesExhausted) continue;
          return candidate.error();
        }
        auto value = score_candidate(reward, question, item.steps, candidate.value().text, usage);
        if (!value.ok()) return value.error();

        BeamItem next = item;
        next.steps.push_back(candidate.value());
        next.scores.push_back(StepScore{candidate.value().index, value.value()});
        next.cumulative = average(next.scores);
        next.answer = scot::extract_answer(candidate.value().text);
        next.alive = !next.answer.has_value();
        pool.push_back(std::move(next));
      }
    }
    stats.per_depth.push_back(
        {usage.policy_calls - policy_before, usage.reward_calls - reward_before});

    if (pool.empty()) {
      return EngineError{EngineErrorKind::DeadEnd,
                         "beam died out at depth " + std::to_string(depth)};
    }
    std::stable_sort(pool.begin(), pool.end(),
                     [](const BeamItem& a, const BeamItem& b) { return a.cumulative > b.cumulative; });
    if (pool.size() > static_cast<size_t>(config.beam_window)) {
      pool.resize(static_cast<size_t>(config.beam_window));
    }
    frontier = std::move(pool);
  }

  stats.policy_calls = usage.policy_calls;
  stats.reward_calls = usage.reward_calls;
  stats.gen_units = usage.gen_units;

  // Frontier is sorted by cumulative score; the first concluded item wins.
  for (const auto& item : frontier) {
    if (item.alive || !item.answer) continue;
    SearchResult result;
    result.best.chain.question_id = question.id;
    result.best.chain.steps = item.steps;
    result.best.chain.final_answer = item.answer;
    result.best.chain.termination = Termination::concluded();
    result.best.chain.token_count = usage.gen_units;
    result.best.step_scores = item.scores;
    result.best.path_score = item.cumulative;
    result.best.aggregation = Aggregation::Avg;
    result.stats = std::move(stats);
    return result;
  }
  return EngineError{EngineErrorKind::AllRolloutsAborted,
                     "no beam item concluded within max_steps"};
}

nlohmann::json to_json(const ScoredChain& sc) {
  nlohmann::json j;
  j["chain"] = atomcot::to_json(sc.chain);
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& s : sc.step_scores) scores.push_back(atomcot::to_json(s));
  j["step_scores"] = std::move(scores);
  j["path_score"] = sc.path_score;
  j["aggregation"] = to_string(sc.aggregation);
  return j;
}

ScoredChain scored_chain_from_json(const nlohmann::json& j) {
  ScoredChain sc;
  sc.chain = chain_from_json(j.at("chain"));
  for (const auto& js : j.at("step_scores")) sc.step_scores.push_back(step_score_from_json(js));
  sc.path_score = j.at("path_score").get<double>();
  auto agg = aggregation_from_string(j.at("aggregation").get<std::string>());
  if (!agg) throw std::runtime_error("unknown aggregation");
  sc.aggregation = *agg;
  return sc;
}

nlohmann::json to_json_with_stats(const ScoredChain& sc, const SearchStats& stats) {
  nlohmann::json j = to_json(sc);
  j["policy_calls"] = stats.policy_calls;
  j["reward_calls"] = stats.reward_calls;
  j["gen_units"] = stats.gen_units;
  nlohmann::json per_depth = nlohmann::json::array();
  for (const auto& d : stats.per_depth) {
    per_depth.push_back({{"policy_calls", d.policy_calls}, {"reward_calls", d.reward_calls}});
  }
  j["per_depth"] = std::move(per_depth);
  return j;
}

}  // namespace atomcot::search
