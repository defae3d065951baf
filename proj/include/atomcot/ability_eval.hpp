#pragma once

/**
 * Atomic capability evaluation: step behavior classification against an
 * editable taxonomy, step utilization rates from rollout continuations, and
 * per-ability aggregation plus the behavior-distribution report.
 *
 * The step utilization rate of a prefix S is the fraction of M seeded
 * rollout continuations from S that reach the gold answer; the score of an
 * ability is the mean utilization over the prefixes whose last step carries
 * that ability.
 */

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomcot/backends.hpp"
#include "atomcot/core_types.hpp"
#include "atomcot/expected.hpp"
#include "atomcot/template_store.hpp"

namespace atomcot::eval {

inline constexpr const char* kUnclassified = "Unclassified";

struct AbilityCategory {
  std::string name;
  std::string description;
  std::vector<std::string> patterns;  // token-boundary substring patterns, case-insensitive
};

struct AbilityTaxonomy {
  std::vector<AbilityCategory> categories;  // priority order; Unclassified last
  std::string version;

  /// The 12 stock ability categories plus the reserved Unclassified bucket.
  static AbilityTaxonomy defaults();
  static AbilityTaxonomy load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Nonempty unique names; appends the Unclassified bucket when missing.
  /// Returns violation messages, empty when valid.
  std::vector<std::string> validate_and_fix();

  bool has_category(const std::string& name) const;
};

/// First category (in taxonomy order) whose pattern matches the step text;
/// Unclassified otherwise. With a classifier backend configured, one call
/// with the clustering template decides instead, falling back to the keyword
/// matcher on failure or on a reply that names no known category.
std::string classify_step(const AtomicStep& step, const AbilityTaxonomy& taxonomy,
                          PolicyBackend* classifier = nullptr,
                          const TemplateStore* templates = nullptr);

struct UtilizationRecord {
  std::string question_id;
  int prefix_length = 0;
  int rollouts = 0;  // completed (non-aborted) continuations, the denominator
  int correct_count = 0;
  double rate = 0.0;  // correct_count / rollouts
  std::string ability_of_last_step;
};

/// Raw per-continuation log entry, enough to recompute every rate.
struct RolloutLog {
  std::string question_id;
  int prefix_length = 0;
  int rollout_index = 0;
  std::optional<std::string> answer;
  bool correct = false;
  bool aborted = false;
};

/// M seeded continuations of `prefix`; the record's ability is that of the
/// prefix's last step. Aborted continuations are excluded from the
/// denominator (and flagged on stderr); when all abort the result is
/// AllRolloutsAborted.
EngineResult<UtilizationRecord> step_utilization(const Question& question,
                                                 std::span<const AtomicStep> prefix,
                                                 PolicyBackend& policy, int rollouts,
                                                 const std::string& gold,
                                                 const SearchConfig& config,
                                                 const AbilityTaxonomy* taxonomy = nullptr,
                                                 std::vector<RolloutLog>* log = nullptr);

struct AbilityScore {
  std::string category;
  int member_count = 0;
  std::optional<double> score;  // absent for empty categories
};

/// Mean rate per category, one row per taxonomy category in order. Records
/// naming a category outside the taxonomy are an error.
EngineResult<std::vector<AbilityScore>> ability_scores(
    std::span<const UtilizationRecord> records, const AbilityTaxonomy& taxonomy);

/// Classifies every step of every chain; fractions over all steps, only
/// nonempty categories reported, in taxonomy order.
std::vector<std::pair<std::string, double>> behavior_distribution(
    std::span<const ReasoningChain> chains, const AbilityTaxonomy& taxonomy);

nlohmann::json to_json(const UtilizationRecord& r);
UtilizationRecord utilization_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RolloutLog& r);
RolloutLog rollout_log_from_json(const nlohmann::json& j);

}  // namespace atomcot::eval
