#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "atomcot/http_backend.hpp"
#include "atomcot/scot_engine.hpp"

using namespace atomcot;
using nlohmann::json;

namespace {

// Loopback chat-completions stub. The handler decides status/body per call;
// every received body is kept for inspection.
class StubServer {
 public:
  using Handler = std::function<std::pair<int, std::string>(const json& body, int call_index)>;

  explicit StubServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      const int index = calls_.fetch_add(1);
      json body = json::parse(req.body);
      {
        std::lock_guard<std::mutex> lock(mutex_);
        bodies_.push_back(body);
        if (req.has_header("Authorization")) {
          auth_headers_.push_back(req.get_header_value("Authorization"));
        }
      }
      auto [status, reply] = handler_(body, index);
      res.status = status;
      res.set_content(reply, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int calls() const { return calls_.load(); }
  json body(size_t i) {
    std::lock_guard<std::mutex> lock(mutex_);
    return bodies_.at(i);
  }
  std::vector<std::string> auth_headers() {
    std::lock_guard<std::mutex> lock(mutex_);
    return auth_headers_;
  }

 private:
  httplib::Server server_;
  Handler handler_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  std::mutex mutex_;
  std::vector<json> bodies_;
  std::vector<std::string> auth_headers_;
};

std::string chat_reply(const std::string& content, int completion_tokens = -1) {
  json j;
  j["choices"] = json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
  if (completion_tokens >= 0) {
    j["usage"] = {{"prompt_tokens", 10}, {"completion_tokens", completion_tokens}};
  }
  return j.dump();
}

HttpBackendConfig fast_config(const std::string& base_url) {
  HttpBackendConfig c;
  c.base_url = base_url;
  c.model = "stub-model";
  c.timeout_sec = 5;
  c.backoff_initial_ms = 1;
  return c;
}

PolicyRequest simple_request() {
  PolicyRequest req;
  req.question.id = "h1";
  req.question.text = "What is 2 + 2?";
  req.history = {"Think about small numbers."};
  req.temperature = 0.5;
  req.max_length = 128;
  return req;
}

}  // namespace

TEST_CASE("policy posts a chat-completions body and parses the reply") {
  StubServer server([](const json&, int) {
    return std::make_pair(200, chat_reply("Add 2 and 2 to get 4.", 9));
  });
  HttpPolicyBackend backend(fast_config(server.base_url()), TemplateStore::builtin());

  auto resp = backend.generate_step(simple_request());
  REQUIRE(resp.ok());
  CHECK(resp.value().text == "Add 2 and 2 to get 4.");
  REQUIRE(resp.value().usage.has_value());
  CHECK(resp.value().usage->completion_tokens == 9);
  CHECK(backend.units_generated() == 9);  // usage overrides character counting

  const json body = server.body(0);
  CHECK(body.at("model") == "stub-model");
  CHECK(body.at("temperature") == 0.5);
  CHECK(body.at("max_tokens") == 128);
  const std::string prompt = body.at("messages").at(0).at("content").get<std::string>();
  CHECK(prompt.find("What is 2 + 2?") != std::string::npos);
  CHECK(prompt.find("Think about small numbers.") != std::string::npos);
}

TEST_CASE("transport failures are retried with backoff, refusals are not") {
  SUBCASE("two 500s then success") {
    StubServer server([](const json&, int call) {
      if (call < 2) return std::make_pair(500, std::string("{}"));
      return std::make_pair(200, chat_reply("Recovered answer step."));
    });
    HttpPolicyBackend backend(fast_config(server.base_url()), TemplateStore::builtin());
    auto resp = backend.generate_step(simple_request());
    REQUIRE(resp.ok());
    CHECK(server.calls() == 3);
  }
  SUBCASE("a 400 stops immediately") {
    StubServer server([](const json&, int) { return std::make_pair(400, std::string("bad")); });
    HttpPolicyBackend backend(fast_config(server.base_url()), TemplateStore::builtin());
    auto resp = backend.generate_step(simple_request());
    REQUIRE_FALSE(resp.ok());
    CHECK(resp.error().kind == BackendErrorKind::Refusal);
    CHECK(server.calls() == 1);
  }
  SUBCASE("persistent 500s exhaust the retry budget") {
    StubServer server([](const json&, int) { return std::make_pair(500, std::string("{}")); });
    HttpPolicyBackend backend(fast_config(server.base_url()), TemplateStore::builtin());
    auto resp = backend.generate_step(simple_request());
    REQUIRE_FALSE(resp.ok());
    CHECK(resp.error().kind == BackendErrorKind::Transport);
    CHECK(server.calls() == 4);  // initial + 3 retries
  }
}

TEST_CASE("empty completions surface as EmptyCompletion") {
  StubServer server([](const json&, int) { return std::make_pair(200, chat_reply("")); });
  HttpPolicyBackend backend(fast_config(server.base_url()), TemplateStore::builtin());
  auto resp = backend.generate_step(simple_request());
  REQUIRE_FALSE(resp.ok());
  CHECK(resp.error().kind == BackendErrorKind::EmptyCompletion);
}

TEST_CASE("multi-step replies are truncated at the first separator") {
  StubServer server([](const json&, int) {
    return std::make_pair(200, chat_reply("First step only.\n\n\n\n\nSecond step leaks."));
  });
  HttpPolicyBackend backend(fast_config(server.base_url()), TemplateStore::builtin());
  auto resp = backend.generate_step(simple_request());
  REQUIRE(resp.ok());
  CHECK(resp.value().text == "First step only.");
}

TEST_CASE("reward request carries the five-newline separator bytes") {
  StubServer server([](const json&, int) { return std::make_pair(200, chat_reply("0.83")); });
  HttpRewardBackend backend(fast_config(server.base_url()), TemplateStore::builtin());

  RewardRequest req;
  req.question_text = "What is 2 + 2?";
  req.history = {"Step one text.", "Step two text."};
  req.candidate = "Candidate step text.";
  auto score = backend.score_step(req);
  REQUIRE(score.ok());
  CHECK(score.value().value == 0.83);
  CHECK(score.value().step_index == 2);

  const json body = server.body(0);
  const std::string joined = body.at("messages").at(2).at("content").get<std::string>();
  size_t count = 0, pos = 0;
  while ((pos = joined.find("\n\n\n\n\n", pos)) != std::string::npos) {
    ++count;
    pos += 5;
  }
  CHECK(count == 2);  // two history steps -> two separators
  CHECK(joined.rfind("Candidate step text.") + std::string("Candidate step text.").size() ==
        joined.size());
}

TEST_CASE("malformed reward replies are rejected") {
  CHECK_FALSE(parse_reward_content("1.7").ok());
  CHECK_FALSE(parse_reward_content("-0.2").ok());
  CHECK_FALSE(parse_reward_content("not a number").ok());
  CHECK_FALSE(parse_reward_content("0.5 with trailing words").ok());
  CHECK(parse_reward_content("0.83").value() == 0.83);
  CHECK(parse_reward_content(" 1\n").value() == 1.0);

  StubServer server([](const json&, int) { return std::make_pair(200, chat_reply("1.7")); });
  HttpRewardBackend backend(fast_config(server.base_url()), TemplateStore::builtin());
  RewardRequest req;
  req.question_text = "q";
  req.candidate = "c";
  auto score = backend.score_step(req);
  REQUIRE_FALSE(score.ok());
  CHECK(score.error().kind == BackendErrorKind::MalformedScore);
}

TEST_CASE("api key from the environment becomes a bearer header") {
  StubServer server([](const json&, int) { return std::make_pair(200, chat_reply("ok step")); });
  HttpBackendConfig cfg = fast_config(server.base_url());
  cfg.api_key_env = "ATOMCOT_TEST_KEY";

  ::setenv("ATOMCOT_TEST_KEY", "sk-fixture", 1);
  HttpPolicyBackend with_key(cfg, TemplateStore::builtin());
  REQUIRE(with_key.generate_step(simple_request()).ok());
  auto headers = server.auth_headers();
  REQUIRE(headers.size() == 1);
  CHECK(headers[0] == "Bearer sk-fixture");
  ::unsetenv("ATOMCOT_TEST_KEY");

  HttpPolicyBackend without_key(cfg, TemplateStore::builtin());
  REQUIRE(without_key.generate_step(simple_request()).ok());
  CHECK(server.auth_headers().size() == 1);  // no new auth header recorded
}

TEST_CASE("image_ref is forwarded as an image_url content part") {
  StubServer server([](const json&, int) { return std::make_pair(200, chat_reply("sees it")); });
  HttpPolicyBackend backend(fast_config(server.base_url()), TemplateStore::builtin());
  PolicyRequest req = simple_request();
  req.question.image_ref = "https://example.test/fig.png";
  REQUIRE(backend.generate_step(req).ok());
  const json content = server.body(0).at("messages").at(0).at("content");
  REQUIRE(content.is_array());
  CHECK(content.at(1).at("type") == "image_url");
  CHECK(content.at(1).at("image_url").at("url") == "https://example.test/fig.png");
}
