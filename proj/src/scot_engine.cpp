#include "atomcot/scot_engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "atomcot/seeding.hpp"

namespace atomcot::scot {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out += ' ';
      in_space = false;
      out += c;
    }
  }
  return out;
}

std::vector<std::string> sentence_segments(const std::string& text) {
  std::vector<std::string> segments;
  std::string current;
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      std::string t = trim(current);
      if (!t.empty()) segments.push_back(std::move(t));
      current.clear();
    } else {
      current += c;
    }
  }
  std::string t = trim(current);
  if (!t.empty()) segments.push_back(std::move(t));
  return segments;
}

}  // namespace

TokenSet tokenize_for_similarity(std::string_view text) {
  TokenSet tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };
  for (char raw : text) {
    const unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

double jaccard(const TokenSet& a, const TokenSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t inter = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const int cmp = a[i].compare(b[j]);
    if (cmp == 0) {
      ++inter;
      ++i;
      ++j;
    } else if (cmp < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  const size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

const char* to_string(AnomalyKind k) {
  switch (k) {
    case AnomalyKind::None: return "None";
    case AnomalyKind::IntraStepRepetition: return "IntraStepRepetition";
    case AnomalyKind::InterStepRepetition: return "InterStepRepetition";
    case AnomalyKind::Overlength: return "Overlength";
    case AnomalyKind::Empty: return "Empty";
  }
  return "None";
}

AnomalyVerdict detect_anomaly(const std::string& candidate,
                              std::span<const std::string> history,
                              const SearchConfig& config) {
  if (trim(candidate).empty()) {
    return {AnomalyKind::Empty, 0.0};
  }
  if (candidate.size() > static_cast<size_t>(config.max_length)) {
    return {AnomalyKind::Overlength, static_cast<double>(candidate.size())};
  }
  const TokenSet cand_tokens = tokenize_for_similarity(candidate);
  double worst_inter = 0.0;
  for (const auto& past : history) {
    worst_inter = std::max(worst_inter, jaccard(cand_tokens, tokenize_for_similarity(past)));
  }
  if (!history.empty() && worst_inter >= config.jaccard_inter_threshold) {
    return {AnomalyKind::InterStepRepetition, worst_inter};
  }
  const auto segments = sentence_segments(candidate);
  double worst_intra = 0.0;
  for (size_t i = 0; i + 1 < segments.size(); ++i) {
    const TokenSet a = tokenize_for_similarity(segments[i]);
    for (size_t j = i + 1; j < segments.size(); ++j) {
      worst_intra = std::max(worst_intra, jaccard(a, tokenize_for_similarity(segments[j])));
    }
  }
  if (segments.size() >= 2 && worst_intra >= config.jaccard_intra_threshold) {
    return {AnomalyKind::IntraStepRepetition, worst_intra};
  }
  return {AnomalyKind::None, std::nullopt};
}

AnomalyVerdict detect_anomaly(const std::string& candidate,
                              std::span<const AtomicStep> history,
                              const SearchConfig& config) {
  std::vector<std::string> texts;
  texts.reserve(history.size());
  for (const auto& s : history) texts.push_back(s.text);
  return detect_anomaly(candidate, texts, config);
}

double next_temperature(const LoopState& state, const SearchConfig& config) {
  const double t =
      config.temperature_start + state.retries_this_step * config.temperature_increment;
  return std::min(t, config.temperature_cap);
}

namespace {

// Case-insensitive search; returns position after the last occurrence of any
// marker, or npos.
size_t last_marker_end(const std::string& lower, std::initializer_list<const char*> markers) {
  size_t best = std::string::npos;
  for (const char* m : markers) {
    const std::string marker = m;
    size_t pos = lower.rfind(marker);
    if (pos != std::string::npos) {
      const size_t end = pos + marker.size();
      if (best == std::string::npos || end > best) best = end;
    }
  }
  return best;
}

}  // namespace

std::string normalize_answer(std::string_view raw) {
  std::string s = trim(raw);
  if (!s.empty() && s.back() == '.') s.pop_back();
  s = trim(s);
  // Unwrap \boxed{...} if the payload is a single wrapper.
  const std::string boxed = "\\boxed{";
  if (s.rfind(boxed, 0) == 0 && !s.empty() && s.back() == '}') {
    s = s.substr(boxed.size(), s.size() - boxed.size() - 1);
  }
  std::string no_dollar;
  no_dollar.reserve(s.size());
  for (char c : s) {
    if (c != '$') no_dollar += c;
  }
  s = collapse_whitespace(no_dollar);
  return to_lower(s);
}

std::optional<std::string> extract_answer(std::string_view text) {
  const std::string lower = to_lower(text);
  const size_t end = last_marker_end(lower, {"the final answer is", "answer:"});
  if (end == std::string::npos) return std::nullopt;
  const std::string tail(text.substr(end));
  std::string normalized = normalize_answer(tail);
  if (normalized.empty()) return std::nullopt;
  return normalized;
}

bool answers_match(const std::string& a, const std::string& b) {
  const std::string na = normalize_answer(a);
  const std::string nb = normalize_answer(b);
  if (na == nb) return true;
  char* end_a = nullptr;
  char* end_b = nullptr;
  const double va = std::strtod(na.c_str(), &end_a);
  const double vb = std::strtod(nb.c_str(), &end_b);
  const bool a_numeric = !na.empty() && end_a == na.c_str() + na.size();
  const bool b_numeric = !nb.empty() && end_b == nb.c_str() + nb.size();
  if (!a_numeric || !b_numeric) return false;
  if (va == vb) return true;
  return std::fabs(va - vb) <= 1e-6 * std::max(std::fabs(va), std::fabs(vb));
}

EngineResult<AtomicStep> sample_step(const Question& question,
                                     std::span<const AtomicStep> history, int lane,
                                     PolicyBackend& policy, const SearchConfig& config,
                                     int round, CallStats& stats, Trace* trace) {
  std::vector<std::string> history_texts;
  history_texts.reserve(history.size());
  for (const auto& s : history) history_texts.push_back(s.text);

  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    const double ladder =
        config.temperature_start + (lane + attempt) * config.temperature_increment;
    const double temperature = std::min(ladder, config.temperature_cap);

    PolicyRequest req;
    req.question = question;
    req.history = history_texts;
    req.temperature = temperature;
    req.max_length = config.max_length;
    req.seed = derive_seed(config.seed, question.id, static_cast<uint64_t>(round),
                           static_cast<uint64_t>(lane), static_cast<uint64_t>(attempt));

    stats.policy_calls += 1;
    auto response = policy.generate_step(req);

    std::string candidate;
    AnomalyVerdict verdict;
    if (response.ok()) {
      candidate = response.value().text;
      stats.gen_units += generated_units(response.value());
      verdict = detect_anomaly(candidate, history_texts, config);
    } else if (response.error().kind == BackendErrorKind::EmptyCompletion) {
      verdict = {AnomalyKind::Empty, 0.0};
    } else {
      return EngineError{EngineErrorKind::BackendFailure,
                         std::string(to_string(response.error().kind)) + ": " +
                             response.error().message};
    }

    const bool accepted = verdict.kind == AnomalyKind::None;
    if (trace) {
      trace->push_back({round, attempt, temperature, candidate, verdict, accepted});
    }
    if (accepted) {
      AtomicStep step;
      step.index = static_cast<int>(history.size());
      step.text = candidate;
      step.temperature = temperature;
      step.retries = attempt;
      return step;
    }
  }

  std::ostringstream os;
  os << "step " << history.size() + 1 << " exhausted " << config.max_retries
     << " retries";
  return EngineError{EngineErrorKind::RetriesExhausted, os.str()};
}

ReasoningChain run_scot(const Question& question, PolicyBackend& policy,
                        const SearchConfig& config,
                        std::span<const AtomicStep> initial_history, Trace* trace,
                        CallStats* stats) {
  ReasoningChain chain;
  chain.question_id = question.id;
  chain.steps.assign(initial_history.begin(), initial_history.end());

  CallStats local;
  CallStats& usage = stats ? *stats : local;
  const long long units_before = usage.gen_units;

  auto finish = [&](Termination t) {
    chain.termination = std::move(t);
    chain.token_count = usage.gen_units - units_before;
    return chain;
  };

  while (static_cast<int>(chain.steps.size()) < config.max_steps) {
    const int round = static_cast<int>(chain.steps.size());
    auto step = sample_step(question, chain.steps, /*lane=*/0, policy, config, round,
                            usage, trace);
    if (!step.ok()) {
      return finish(Termination::aborted(std::string(to_string(step.error().kind)) + ": " +
                                         step.error().message));
    }
    chain.steps.push_back(step.value());
    if (auto answer = extract_answer(step.value().text)) {
      chain.final_answer = *answer;
      return finish(Termination::concluded());
    }
  }
  return finish(Termination::max_steps());
}

}  // namespace atomcot::scot
