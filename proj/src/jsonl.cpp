#include "atomcot/jsonl.hpp"

#include <cctype>

namespace atomcot {

using nlohmann::json;

namespace {

std::string trimmed(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

}  // namespace

json to_json(const Question& q) {
  json j;
  j["id"] = q.id;
  j["text"] = q.text;
  if (q.image_ref) j["image_ref"] = *q.image_ref;
  if (q.gold_answer) j["gold_answer"] = *q.gold_answer;
  j["metadata"] = q.metadata;
  return j;
}

Question question_from_json(const json& j) {
  Question q;
  q.id = j.at("id").get<std::string>();
  q.text = j.at("text").get<std::string>();
  if (j.contains("image_ref")) q.image_ref = j.at("image_ref").get<std::string>();
  if (j.contains("gold_answer")) q.gold_answer = j.at("gold_answer").get<std::string>();
  if (j.contains("metadata")) {
    q.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  }
  require(!q.id.empty(), "question id must be nonempty");
  require(!q.text.empty(), "question text must be nonempty");
  return q;
}

json to_json(const AtomicStep& s) {
  json j;
  j["index"] = s.index;
  j["text"] = s.text;
  if (s.behavior) j["behavior"] = *s.behavior;
  j["temperature"] = s.temperature;
  j["retries"] = s.retries;
  return j;
}

AtomicStep step_from_json(const json& j) {
  AtomicStep s;
  s.index = j.at("index").get<int>();
  s.text = j.at("text").get<std::string>();
  if (j.contains("behavior")) s.behavior = j.at("behavior").get<std::string>();
  s.temperature = j.at("temperature").get<double>();
  s.retries = j.at("retries").get<int>();
  require(!trimmed(s.text).empty(), "step text must be nonempty after trimming");
  require(s.temperature >= 0.0, "step temperature must be >= 0");
  require(s.retries >= 0, "step retries must be >= 0");
  require(s.index >= 0, "step index must be >= 0");
  return s;
}

json to_json(const ReasoningChain& c) {
  json j;
  j["question_id"] = c.question_id;
  json steps = json::array();
  for (const auto& s : c.steps) steps.push_back(to_json(s));
  j["steps"] = std::move(steps);
  if (c.final_answer) j["final_answer"] = *c.final_answer;
  j["termination"] = to_string(c.termination.kind);
  if (c.termination.kind == TerminationKind::Aborted) {
    j["termination_reason"] = c.termination.reason;
  }
  j["token_count"] = c.token_count;
  return j;
}

ReasoningChain chain_from_json(const json& j) {
  ReasoningChain c;
  c.question_id = j.at("question_id").get<std::string>();
  for (const auto& js : j.at("steps")) c.steps.push_back(step_from_json(js));
  if (j.contains("final_answer")) c.final_answer = j.at("final_answer").get<std::string>();
  auto kind = termination_kind_from_string(j.at("termination").get<std::string>());
  require(kind.has_value(), "unknown termination kind");
  c.termination = Termination{*kind, ""};
  if (j.contains("termination_reason")) {
    c.termination.reason = j.at("termination_reason").get<std::string>();
  }
  c.token_count = j.at("token_count").get<long long>();

  for (size_t i = 0; i < c.steps.size(); ++i) {
    require(c.steps[i].index == static_cast<int>(i), "step indices must be 0..n-1 contiguous");
  }
  const bool concluded = c.termination.kind == TerminationKind::Concluded;
  require(c.final_answer.has_value() == concluded,
          "final_answer must be present iff termination is Concluded");
  require(c.termination.kind != TerminationKind::Aborted || !c.termination.reason.empty(),
          "aborted chains must carry a termination_reason");
  return c;
}

json to_json(const StepScore& s) {
  json j;
  j["step_index"] = s.step_index;
  j["value"] = s.value;
  return j;
}

StepScore step_score_from_json(const json& j) {
  StepScore s;
  s.step_index = j.at("step_index").get<int>();
  s.value = j.at("value").get<double>();
  require(s.value >= 0.0 && s.value <= 1.0, "step score value must lie in [0,1]");
  return s;
}

}  // namespace atomcot
