#pragma once

/**
 * Backend interfaces for the policy model (generates atomic steps) and the
 * process reward model (scores candidate steps).
 *
 * Backends are shareable services: generate_step/score_step may be called
 * from many threads at once. Call counters are atomics and count every
 * attempt, success or not; generated-unit counters use the backend-reported
 * completion tokens when available and fall back to character counts.
 */

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atomcot/core_types.hpp"
#include "atomcot/expected.hpp"

namespace atomcot {

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct PolicyRequest {
  Question question;
  std::vector<std::string> history;  // accepted step texts, oldest first
  double temperature = 0.0;
  int max_length = 600;
  std::string prompt_template_id = "scot_step";
  uint64_t seed = 0;  // consumed by deterministic mocks, ignored by remotes
  // When set, remote backends send this text verbatim instead of rendering
  // prompt_template_id; used by pipeline stages that build their own prompts.
  std::optional<std::string> rendered_prompt;
};

struct PolicyResponse {
  std::string text;
  std::optional<TokenUsage> usage;
  bool finish_flag = false;  // backend signaled a final answer
};

struct RewardRequest {
  std::string question_text;
  std::vector<std::string> history;
  std::string candidate;
};

/// Units consumed by a response: reported completion tokens, else characters.
long long generated_units(const PolicyResponse& r);

std::optional<BackendError> validate_request(const PolicyRequest& req);
std::optional<BackendError> validate_request(const RewardRequest& req);

class PolicyBackend {
 public:
  virtual ~PolicyBackend() = default;

  /// One candidate atomic step. Single-step output is part of the contract:
  /// implementations truncate at the first step separator if the underlying
  /// model emits more.
  BackendResult<PolicyResponse> generate_step(const PolicyRequest& req);

  virtual std::string id() const = 0;

  long long calls() const { return calls_.load(); }
  long long units_generated() const { return units_.load(); }

 protected:
  virtual BackendResult<PolicyResponse> do_generate(const PolicyRequest& req) = 0;

 private:
  std::atomic<long long> calls_{0};
  std::atomic<long long> units_{0};
};

class RewardBackend {
 public:
  virtual ~RewardBackend() = default;

  /// Scores the candidate step given question and history; value in [0,1].
  BackendResult<StepScore> score_step(const RewardRequest& req);

  virtual std::string id() const = 0;

  long long calls() const { return calls_.load(); }

 protected:
  virtual BackendResult<StepScore> do_score(const RewardRequest& req) = 0;

 private:
  std::atomic<long long> calls_{0};
};

/// The literal step separator used when flattening histories for reward
/// backends: five newline bytes.
inline constexpr std::string_view kStepSeparator = "\n\n\n\n\n";

/// history[0] <sep> ... <sep> history[k-1] <sep> candidate — exactly k
/// separators for k history steps.
std::string build_reward_prompt(std::span<const std::string> history,
                                const std::string& candidate);

/// Runs all requests with at most `parallelism` in flight; responses come
/// back in request order and one failure never aborts its siblings.
std::vector<BackendResult<PolicyResponse>> batch_generate(
    PolicyBackend& backend, std::span<const PolicyRequest> requests, int parallelism);

/// Calls fn(i) for i in [0,n) on up to `parallelism` threads. The first
/// exception thrown by fn, if any, is rethrown after all workers join.
void parallel_for(size_t n, int parallelism, const std::function<void(size_t)>& fn);

}  // namespace atomcot
