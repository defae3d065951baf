#include "atomcot/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "atomcot/scot_engine.hpp"

namespace atomcot {

using nlohmann::json;

namespace {

struct ChatOutcome {
  std::string content;
  std::optional<TokenUsage> usage;
};

std::string join_history(const std::vector<std::string>& history) {
  std::string out;
  for (size_t i = 0; i < history.size(); ++i) {
    out += "Step " + std::to_string(i + 1) + ": " + history[i];
    if (i + 1 < history.size()) out += "\n";
  }
  if (out.empty()) out = "(none)";
  return out;
}

BackendResult<ChatOutcome> post_chat(const HttpBackendConfig& config, json body) {
  body["model"] = config.model;

  httplib::Client client(config.base_url);
  client.set_connection_timeout(config.timeout_sec, 0);
  client.set_read_timeout(config.timeout_sec, 0);

  httplib::Headers headers;
  if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const std::string payload = body.dump();
  int backoff_ms = config.backoff_initial_ms;
  std::string last_error;
  for (int attempt = 0; attempt <= config.max_transport_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    auto res = client.Post(config.chat_path, headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      return BackendError{BackendErrorKind::Refusal,
                          "http status " + std::to_string(res->status) + ": " + res->body};
    }
    try {
      const json reply = json::parse(res->body);
      ChatOutcome outcome;
      outcome.content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      if (reply.contains("usage")) {
        TokenUsage usage;
        usage.prompt_tokens = reply["usage"].value("prompt_tokens", 0);
        usage.completion_tokens = reply["usage"].value("completion_tokens", 0);
        outcome.usage = usage;
      }
      return outcome;
    } catch (const std::exception& e) {
      last_error = std::string("malformed response body: ") + e.what();
      continue;
    }
  }
  return BackendError{BackendErrorKind::Transport, last_error};
}

}  // namespace

HttpPolicyBackend::HttpPolicyBackend(HttpBackendConfig config, TemplateStore templates)
    : config_(std::move(config)), templates_(std::move(templates)) {}

HttpPolicyBackend::~HttpPolicyBackend() = default;

std::string HttpPolicyBackend::id() const {
  return "http-policy:" + config_.base_url + "#" + config_.model;
}

BackendResult<PolicyResponse> HttpPolicyBackend::do_generate(const PolicyRequest& req) {
  const std::string prompt =
      req.rendered_prompt
          ? *req.rendered_prompt
          : templates_.render(req.prompt_template_id, {{"question", req.question.text},
                                                       {"history", join_history(req.history)}});

  json content;
  if (req.question.image_ref) {
    content = json::array({{{"type", "text"}, {"text", prompt}},
                           {{"type", "image_url"},
                            {"image_url", {{"url", *req.question.image_ref}}}}});
  } else {
    content = prompt;
  }
  json body;
  body["messages"] = json::array({{{"role", "user"}, {"content", std::move(content)}}});
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_length;

  auto outcome = post_chat(config_, std::move(body));
  if (!outcome.ok()) return outcome.error();

  PolicyResponse resp;
  resp.text = outcome.value().content;
  // Single-step contract: cut anything past the first step separator.
  if (const size_t sep = resp.text.find(kStepSeparator); sep != std::string::npos) {
    resp.text.resize(sep);
  }
  resp.usage = outcome.value().usage;
  resp.finish_flag = scot::extract_answer(resp.text).has_value();
  return resp;
}

HttpRewardBackend::HttpRewardBackend(HttpBackendConfig config, TemplateStore templates)
    : config_(std::move(config)), templates_(std::move(templates)) {}

HttpRewardBackend::~HttpRewardBackend() = default;

std::string HttpRewardBackend::id() const {
  return "http-reward:" + config_.base_url + "#" + config_.model;
}

BackendResult<double> parse_reward_content(const std::string& content) {
  char* end = nullptr;
  const char* begin = content.c_str();
  const double value = std::strtod(begin, &end);
  if (end == begin) {
    return BackendError{BackendErrorKind::MalformedScore,
                        "reward reply is not numeric: " + content};
  }
  while (*end == ' ' || *end == '\n' || *end == '\r' || *end == '\t') ++end;
  if (*end != '\0') {
    return BackendError{BackendErrorKind::MalformedScore,
                        "reward reply has trailing content: " + content};
  }
  if (!(value >= 0.0 && value <= 1.0)) {
    return BackendError{BackendErrorKind::MalformedScore,
                        "reward value outside [0,1]: " + content};
  }
  return value;
}

BackendResult<StepScore> HttpRewardBackend::do_score(const RewardRequest& req) {
  json body;
  body["messages"] = json::array(
      {{{"role", "system"}, {"content", templates_.raw("prm_score")}},
       {{"role", "user"}, {"content", "Question: " + req.question_text}},
       {{"role", "user"}, {"content", build_reward_prompt(req.history, req.candidate)}}});
  body["temperature"] = 0.0;
  body["max_tokens"] = 16;

  auto outcome = post_chat(config_, std::move(body));
  if (!outcome.ok()) return outcome.error();

  auto value = parse_reward_content(outcome.value().content);
  if (!value.ok()) return value.error();

  StepScore score;
  score.step_index = static_cast<int>(req.history.size());
  score.value = value.value();
  return score;
}

}  // namespace atomcot
