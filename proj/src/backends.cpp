#include "atomcot/backends.hpp"

#include <exception>
#include <mutex>
#include <thread>

namespace atomcot {

long long generated_units(const PolicyResponse& r) {
  if (r.usage) return r.usage->completion_tokens;
  return static_cast<long long>(r.text.size());
}

std::optional<BackendError> validate_request(const PolicyRequest& req) {
  if (req.temperature < 0.0) {
    return BackendError{BackendErrorKind::Refusal, "temperature must be >= 0"};
  }
  if (req.question.text.empty()) {
    return BackendError{BackendErrorKind::Refusal, "question text must be nonempty"};
  }
  return std::nullopt;
}

std::optional<BackendError> validate_request(const RewardRequest& req) {
  if (req.candidate.empty()) {
    return BackendError{BackendErrorKind::Refusal, "candidate step must be nonempty"};
  }
  return std::nullopt;
}

BackendResult<PolicyResponse> PolicyBackend::generate_step(const PolicyRequest& req) {
  if (auto err = validate_request(req)) return *err;
  calls_.fetch_add(1, std::memory_order_relaxed);
  auto result = do_generate(req);
  if (result.ok()) {
    if (result.value().text.empty()) {
      return BackendError{BackendErrorKind::EmptyCompletion, "backend returned empty text"};
    }
    units_.fetch_add(generated_units(result.value()), std::memory_order_relaxed);
  }
  return result;
}

BackendResult<StepScore> RewardBackend::score_step(const RewardRequest& req) {
  if (auto err = validate_request(req)) return *err;
  calls_.fetch_add(1, std::memory_order_relaxed);
  auto result = do_score(req);
  if (result.ok()) {
    const double v = result.value().value;
    if (!(v >= 0.0 && v <= 1.0)) {
      return BackendError{BackendErrorKind::MalformedScore,
                          "score outside [0,1]: " + std::to_string(v)};
    }
  }
  return result;
}

std::string build_reward_prompt(std::span<const std::string> history,
                                const std::string& candidate) {
  std::string out;
  size_t total = candidate.size();
  for (const auto& h : history) total += h.size() + kStepSeparator.size();
  out.reserve(total);
  for (const auto& h : history) {
    out += h;
    out += kStepSeparator;
  }
  out += candidate;
  return out;
}

void parallel_for(size_t n, int parallelism, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  const size_t workers =
      std::min<size_t>(n, static_cast<size_t>(std::max(parallelism, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<BackendResult<PolicyResponse>> batch_generate(
    PolicyBackend& backend, std::span<const PolicyRequest> requests, int parallelism) {
  std::vector<BackendResult<PolicyResponse>> out(
      requests.size(),
      BackendResult<PolicyResponse>(BackendError{BackendErrorKind::Transport, "not run"}));
  parallel_for(requests.size(), parallelism,
               [&](size_t i) { out[i] = backend.generate_step(requests[i]); });
  return out;
}

}  // namespace atomcot
