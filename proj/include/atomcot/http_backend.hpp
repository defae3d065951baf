#pragma once

/**
 * Chat-completions HTTP clients for the policy and reward roles.
 *
 * Request shape (POST {base_url}{chat_path}):
 *   { "model": "...", "messages": [{"role": "...", "content": ...}, ...],
 *     "temperature": t, "max_tokens": n }
 * Response shape: { "choices": [{"message": {"content": "..."}}],
 *                   "usage": {"prompt_tokens": p, "completion_tokens": c} }
 *
 * The policy prompt is rendered from the template store; an image_ref on the
 * question is forwarded untouched as an image_url content part. The reward
 * prompt carries the question in one user message and the history plus
 * candidate joined by the five-newline step separator in another; the reply
 * body must parse as a single number in [0,1].
 *
 * Transport failures (connect errors, timeouts, 5xx, 429) are retried with
 * exponential backoff; other 4xx responses are refusals and never retried.
 * The API key, when the environment variable is set, is sent as a Bearer
 * token.
 */

#include <memory>
#include <string>

#include "atomcot/backends.hpp"
#include "atomcot/template_store.hpp"

namespace atomcot {

struct HttpBackendConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8000
  std::string model = "default";
  std::string chat_path = "/v1/chat/completions";
  std::string api_key_env = "ATOMCOT_API_KEY";
  int timeout_sec = 60;
  int max_transport_retries = 3;
  int backoff_initial_ms = 200;
};

class HttpPolicyBackend : public PolicyBackend {
 public:
  HttpPolicyBackend(HttpBackendConfig config, TemplateStore templates);
  ~HttpPolicyBackend() override;

  std::string id() const override;

 protected:
  BackendResult<PolicyResponse> do_generate(const PolicyRequest& req) override;

 private:
  HttpBackendConfig config_;
  TemplateStore templates_;
};

class HttpRewardBackend : public RewardBackend {
 public:
  HttpRewardBackend(HttpBackendConfig config, TemplateStore templates);
  ~HttpRewardBackend() override;

  std::string id() const override;

 protected:
  BackendResult<StepScore> do_score(const RewardRequest& req) override;

 private:
  HttpBackendConfig config_;
  TemplateStore templates_;
};

/// Parses a reward reply body; MalformedScore unless it is one number
/// in [0,1].
BackendResult<double> parse_reward_content(const std::string& content);

}  // namespace atomcot
