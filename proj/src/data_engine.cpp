#include "atomcot/data_engine.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "atomcot/scot_engine.hpp"
#include "atomcot/seeding.hpp"

namespace atomcot::data {

namespace {

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

constexpr int kParseRetries = 3;

}  // namespace

std::optional<std::pair<CotAction, std::string>> parse_cot_action(const std::string& reply) {
  std::optional<CotAction> action;
  std::vector<std::string> step_lines;
  bool in_step = false;
  for (const auto& line : split_lines(reply)) {
    const std::string lower = to_lower(trim(line));
    if (lower.rfind("action:", 0) == 0) {
      const std::string tag = trim(lower.substr(7));
      if (tag == "continue") action = CotAction::ContinueReasoning;
      else if (tag == "verify") action = CotAction::Verify;
      else if (tag == "conclude") action = CotAction::DrawConclusion;
      else return std::nullopt;
      in_step = false;
      continue;
    }
    if (lower.rfind("step:", 0) == 0) {
      step_lines.push_back(trim(line.substr(line.find(':') + 1)));
      in_step = true;
      continue;
    }
    if (in_step || !step_lines.empty()) {
      step_lines.push_back(line);
    } else if (!trim(line).empty()) {
      // Content before any STEP: tag still counts as step text.
      step_lines.push_back(line);
    }
  }
  if (!action) return std::nullopt;
  std::string step;
  for (size_t i = 0; i < step_lines.size(); ++i) {
    if (i) step += "\n";
    step += step_lines[i];
  }
  step = trim(step);
  if (step.empty()) return std::nullopt;
  return std::make_pair(*action, step);
}

EngineResult<ReasoningChain> generate_long_cot(const Question& question,
                                               PolicyBackend& backend,
                                               const TemplateStore& templates,
                                               const SearchConfig& config) {
  ReasoningChain chain;
  chain.question_id = question.id;
  long long units = 0;

  std::string previous_stage = "(start)";
  while (static_cast<int>(chain.steps.size()) < config.max_steps) {
    const int round = static_cast<int>(chain.steps.size());
    std::string current_state = chain.steps.empty() ? "(no steps yet)" : chain.steps.back().text;

    std::optional<std::pair<CotAction, std::string>> parsed;
    for (int attempt = 0; attempt <= kParseRetries; ++attempt) {
      PolicyRequest req;
      req.question = question;
      for (const auto& s : chain.steps) req.history.push_back(s.text);
      req.temperature = config.temperature_start;
      req.max_length = config.max_length;
      req.prompt_template_id = "long_cot_dynamic";
      req.rendered_prompt = templates.render(
          "long_cot_dynamic", {{"question", question.text},
                               {"previous_stage", previous_stage},
                               {"current_state", current_state}});
      req.seed = derive_seed(config.seed, question.id, fnv1a64("long-cot"),
                             static_cast<uint64_t>(round), static_cast<uint64_t>(attempt));
      auto response = backend.generate_step(req);
      if (!response.ok()) {
        return EngineError{EngineErrorKind::BackendFailure,
                           std::string(to_string(response.error().kind)) + ": " +
                               response.error().message};
      }
      units += generated_units(response.value());
      parsed = parse_cot_action(response.value().text);
      if (parsed && parsed->first == CotAction::DrawConclusion &&
          !scot::extract_answer(parsed->second)) {
        parsed.reset();  // a conclusion without an answer is not usable
      }
      if (parsed) break;
    }
    if (!parsed) {
      return EngineError{EngineErrorKind::UnparsableAction,
                         "no parsable action tag after " + std::to_string(kParseRetries) +
                             " retries"};
    }

    AtomicStep step;
    step.index = round;
    step.text = parsed->second;
    step.temperature = config.temperature_start;
    chain.steps.push_back(step);
    previous_stage = current_state;

    if (parsed->first == CotAction::DrawConclusion) {
      chain.final_answer = scot::extract_answer(step.text);
      chain.termination = Termination::concluded();
      chain.token_count = units;
      return chain;
    }
  }
  chain.termination = Termination::max_steps();
  chain.token_count = units;
  return chain;
}

EngineResult<ReasoningChain> augment_short_cot(const Question& question,
                                               const std::string& short_cot,
                                               PolicyBackend& backend,
                                               const TemplateStore& templates,
                                               const SearchConfig& config) {
  if (trim(short_cot).empty()) {
    return EngineError{EngineErrorKind::BadInput, "short_cot must be nonempty"};
  }

  PolicyRequest req;
  req.question = question;
  req.rendered_prompt = templates.render(
      "short_cot_augment", {{"question", question.text}, {"short_cot", short_cot}});
  req.prompt_template_id = "short_cot_augment";
  req.temperature = config.temperature_start;
  req.max_length = config.max_length * std::max(config.max_steps, 1);
  req.seed = derive_seed(config.seed, question.id, fnv1a64("augment"));
  auto response = backend.generate_step(req);
  if (!response.ok()) {
    return EngineError{EngineErrorKind::BackendFailure,
                       std::string(to_string(response.error().kind)) + ": " +
                           response.error().message};
  }

  std::vector<std::string> pieces;
  const std::string& text = response.value().text;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t sep = text.find(kStepSeparator, pos);
    const size_t end = sep == std::string::npos ? text.size() : sep;
    const std::string piece = trim(text.substr(pos, end - pos));
    if (!piece.empty()) pieces.push_back(piece);
    if (sep == std::string::npos) break;
    pos = sep + kStepSeparator.size();
  }
  if (pieces.empty()) {
    return EngineError{EngineErrorKind::SegmentationFailure, "augmentation produced no steps"};
  }

  ReasoningChain chain;
  chain.question_id = question.id;
  chain.token_count = generated_units(response.value());
  for (size_t i = 0; i < pieces.size(); ++i) {
    std::vector<std::string> history;
    for (const auto& s : chain.steps) history.push_back(s.text);
    const auto verdict = scot::detect_anomaly(pieces[i], history, config);
    if (verdict.kind != scot::AnomalyKind::None) {
      return EngineError{EngineErrorKind::SegmentationFailure,
                         "segmented step " + std::to_string(i) + " is anomalous (" +
                             scot::to_string(verdict.kind) + ")"};
    }
    AtomicStep step;
    step.index = static_cast<int>(i);
    step.text = pieces[i];
    step.temperature = config.temperature_start;
    chain.steps.push_back(std::move(step));
  }

  chain.final_answer = scot::extract_answer(chain.steps.back().text);
  if (!chain.final_answer) {
    return EngineError{EngineErrorKind::SegmentationFailure,
                       "augmented steps do not end with a concluding answer"};
  }
  chain.termination = Termination::concluded();
  return chain;
}

EngineResult<DifficultyRecord> score_difficulty(const Question& question,
                                                PolicyBackend& policy, int n,
                                                const SearchConfig& config,
                                                AnswerMatcher matcher) {
  if (!question.gold_answer) {
    return EngineError{EngineErrorKind::MissingGold,
                       "question " + question.id + " has no gold answer"};
  }
  if (n < 1) {
    return EngineError{EngineErrorKind::BadInput, "n must be >= 1"};
  }
  if (!matcher) matcher = scot::answers_match;

  DifficultyRecord record;
  record.question_id = question.id;
  record.n_samples = n;
  for (int i = 0; i < n; ++i) {
    SearchConfig cfg = config;
    cfg.seed = derive_seed(config.seed, question.id, fnv1a64("difficulty"),
                           static_cast<uint64_t>(i));
    const ReasoningChain chain = scot::run_scot(question, policy, cfg);
    if (chain.final_answer && matcher(*chain.final_answer, *question.gold_answer)) {
      record.n_correct += 1;
    }
  }
  record.level = static_cast<double>(record.n_correct) / static_cast<double>(n);
  return record;
}

EngineResult<ReviewVerdict> review_chain(const Question& question, const ReasoningChain& chain,
                                         PolicyBackend& backend,
                                         const TemplateStore& templates) {
  std::string steps;
  for (const auto& s : chain.steps) {
    steps += std::to_string(s.index + 1) + ". " + s.text + "\n";
  }
  PolicyRequest req;
  req.question = question;
  req.rendered_prompt = templates.render(
      "review_filter", {{"question", question.text},
                        {"steps", steps},
                        {"answer", chain.final_answer.value_or("(none)")}});
  req.prompt_template_id = "review_filter";
  req.seed = derive_seed(fnv1a64("review"), question.id);
  auto response = backend.generate_step(req);
  if (!response.ok()) {
    return EngineError{EngineErrorKind::BackendFailure,
                       std::string(to_string(response.error().kind)) + ": " +
                           response.error().message};
  }
  for (const auto& line : split_lines(response.value().text)) {
    const std::string lower = to_lower(trim(line));
    if (lower.rfind("verdict:", 0) != 0) continue;
    const std::string tag = trim(lower.substr(8));
    ReviewVerdict verdict;
    verdict.question_id = question.id;
    if (tag == "accept") {
      verdict.decision = ReviewDecision::Accept;
    } else if (tag == "reject") {
      verdict.decision = ReviewDecision::Reject;
    } else {
      continue;
    }
    for (const auto& l2 : split_lines(response.value().text)) {
      const std::string lower2 = to_lower(trim(l2));
      if (lower2.rfind("reason:", 0) == 0) {
        verdict.reason = trim(l2.substr(l2.find(':') + 1));
        break;
      }
    }
    return verdict;
  }
  return EngineError{EngineErrorKind::UnparsableAction, "no VERDICT line in review reply"};
}

std::vector<std::string> filter_dataset(std::span<const DifficultyRecord> records,
                                        std::span<const ReviewVerdict> reviews,
                                        const FilterPolicy& policy) {
  std::set<std::string> rejected;
  for (const auto& v : reviews) {
    if (v.decision == ReviewDecision::Reject) rejected.insert(v.question_id);
  }
  std::vector<std::string> kept;
  for (const auto& r : records) {
    const double level =
        policy.reading == DifficultyReading::WinRate ? r.level : 1.0 - r.level;
    if (level <= policy.remove_level_at_or_below) continue;
    if (rejected.count(r.question_id)) continue;
    kept.push_back(r.question_id);
  }
  return kept;
}

EngineResult<std::vector<SftSample>> build_sft_samples(const ReasoningChain& chain) {
  if (chain.termination.kind != TerminationKind::Concluded || chain.steps.empty()) {
    return EngineError{EngineErrorKind::NotConcluded,
                       "only concluded chains expand into SFT samples"};
  }
  std::vector<SftSample> samples;
  samples.reserve(chain.steps.size());
  for (size_t i = 0; i < chain.steps.size(); ++i) {
    SftSample s;
    s.question_id = chain.question_id;
    for (size_t j = 0; j < i; ++j) s.history.push_back(chain.steps[j].text);
    s.target = chain.steps[i].text;
    s.is_final = scot::extract_answer(s.target).has_value();
    samples.push_back(std::move(s));
  }
  return samples;
}

nlohmann::json to_json(const SftSample& s) {
  nlohmann::json j;
  j["question_id"] = s.question_id;
  j["history"] = s.history;
  j["target"] = s.target;
  j["is_final"] = s.is_final;
  return j;
}

SftSample sft_sample_from_json(const nlohmann::json& j) {
  SftSample s;
  s.question_id = j.at("question_id").get<std::string>();
  s.history = j.at("history").get<std::vector<std::string>>();
  s.target = j.at("target").get<std::string>();
  s.is_final = j.at("is_final").get<bool>();
  if (s.target.empty()) throw std::runtime_error("sft target must be nonempty");
  return s;
}

nlohmann::json to_json(const ReviewVerdict& v) {
  nlohmann::json j;
  j["question_id"] = v.question_id;
  j["verdict"] = v.decision == ReviewDecision::Accept ? "accept" : "reject";
  if (!v.reason.empty()) j["reason"] = v.reason;
  return j;
}

ReviewVerdict review_verdict_from_json(const nlohmann::json& j) {
  ReviewVerdict v;
  v.question_id = j.at("question_id").get<std::string>();
  const std::string tag = j.at("verdict").get<std::string>();
  if (tag == "accept") {
    v.decision = ReviewDecision::Accept;
  } else if (tag == "reject") {
    v.decision = ReviewDecision::Reject;
  } else {
    throw std::runtime_error("unknown review verdict: " + tag);
  }
  if (j.contains("reason")) v.reason = j.at("reason").get<std::string>();
  return v;
}

}  // namespace atomcot::data
