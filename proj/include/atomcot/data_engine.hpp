#pragma once

/**
 * Dataset pipeline: long-CoT generation through the dynamic-prompt state
 * machine, short-CoT augmentation into atomic steps, win-rate difficulty
 * scoring, bad-case filtering, and serialized-masking SFT sample
 * construction.
 */

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomcot/backends.hpp"
#include "atomcot/core_types.hpp"
#include "atomcot/expected.hpp"
#include "atomcot/template_store.hpp"

namespace atomcot::data {

enum class CotAction { ContinueReasoning, Verify, DrawConclusion };

/// Parses the "ACTION: continue|verify|conclude" tag line and the step text
/// from a backend reply; nullopt when the tag is missing or unknown.
std::optional<std::pair<CotAction, std::string>> parse_cot_action(const std::string& reply);

/// Iterates the dynamic prompt: each round feeds (previous stage, current
/// state) to the backend, parses the declared action and appends the step.
/// Stops on DrawConclusion or config.max_steps. A reply without a parsable
/// action (or a conclusion without an extractable answer) is retried up to 3
/// times before UnparsableAction.
EngineResult<ReasoningChain> generate_long_cot(const Question& question,
                                               PolicyBackend& backend,
                                               const TemplateStore& templates,
                                               const SearchConfig& config);

/// One augmentation call; the reply is split on the five-newline step
/// separator and every step must pass the anomaly filter and the last one
/// must conclude, otherwise SegmentationFailure.
EngineResult<ReasoningChain> augment_short_cot(const Question& question,
                                               const std::string& short_cot,
                                               PolicyBackend& backend,
                                               const TemplateStore& templates,
                                               const SearchConfig& config);

struct DifficultyRecord {
  std::string question_id;
  int n_samples = 0;
  int n_correct = 0;
  double level = 0.0;  // win rate: n_correct / n_samples
};

using AnswerMatcher = std::function<bool(const std::string& extracted, const std::string& gold)>;

/// Runs n seeded rollouts and reports the win rate as the difficulty level.
/// The default matcher is normalized string equality with a 1e-6 relative
/// numeric tolerance.
EngineResult<DifficultyRecord> score_difficulty(const Question& question,
                                                PolicyBackend& policy, int n,
                                                const SearchConfig& config,
                                                AnswerMatcher matcher = {});

enum class ReviewDecision { Accept, Reject };

struct ReviewVerdict {
  std::string question_id;
  ReviewDecision decision = ReviewDecision::Accept;
  std::string reason;
};

/// Secondary review of a generated chain through the review template;
/// verdicts may equally come from a human-supplied JSONL file.
EngineResult<ReviewVerdict> review_chain(const Question& question, const ReasoningChain& chain,
                                         PolicyBackend& backend, const TemplateStore& templates);

/// Which way the win rate is read when removing questions. WinRate removes
/// never-solved questions (rate <= threshold); InverseWinRate treats
/// 1 - rate as the level instead.
enum class DifficultyReading { WinRate, InverseWinRate };

struct FilterPolicy {
  double remove_level_at_or_below = 0.0;
  DifficultyReading reading = DifficultyReading::WinRate;
};

/// Kept question ids in input order: drops records at or below the removal
/// threshold and records whose review verdict is Reject.
std::vector<std::string> filter_dataset(std::span<const DifficultyRecord> records,
                                        std::span<const ReviewVerdict> reviews,
                                        const FilterPolicy& policy);

struct SftSample {
  std::string question_id;
  std::vector<std::string> history;  // step texts 0..i-1
  std::string target;                // step text i
  bool is_final = false;             // target carries an extractable answer
};

/// Serialized masking: a concluded k-step chain expands into exactly k
/// samples, sample i predicting step i from steps 0..i-1.
EngineResult<std::vector<SftSample>> build_sft_samples(const ReasoningChain& chain);

nlohmann::json to_json(const SftSample& s);
SftSample sft_sample_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ReviewVerdict& v);
ReviewVerdict review_verdict_from_json(const nlohmann::json& j);

}  // namespace atomcot::data
