#include "atomcot/ability_eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "atomcot/scot_engine.hpp"
#include "atomcot/seeding.hpp"

namespace atomcot::eval {

namespace {

// Lowercase, punctuation folded to spaces, single-spaced, padded with one
// space on both ends so patterns match on token boundaries.
std::string padded_normal_form(std::string_view text) {
  std::string out = " ";
  bool in_space = true;
  for (char raw : text) {
    const unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      out += static_cast<char>(std::tolower(c));
      in_space = false;
    } else if (!in_space) {
      out += ' ';
      in_space = true;
    }
  }
  if (out.back() != ' ') out += ' ';
  return out;
}

bool pattern_matches(const std::string& padded_text, const std::string& pattern) {
  const std::string needle = padded_normal_form(pattern);
  if (needle == " ") return false;
  return padded_text.find(needle) != std::string::npos;
}

std::string keyword_classify(const std::string& text, const AbilityTaxonomy& taxonomy) {
  const std::string padded = padded_normal_form(text);
  for (const auto& category : taxonomy.categories) {
    for (const auto& pattern : category.patterns) {
      if (pattern_matches(padded, pattern)) return category.name;
    }
  }
  return kUnclassified;
}

}  // namespace

AbilityTaxonomy AbilityTaxonomy::defaults() {
  AbilityTaxonomy t;
  t.version = "default-12";
  t.categories = {
      {"Image Description", "Describes what the image or figure shows",
       {"image", "picture", "figure shows", "image shows"}},
      {"Information Extraction", "Pulls given facts out of the problem statement",
       {"given", "problem statement", "problem states", "extract"}},
      {"Graphs Analysis", "Reads off structure from a graph or plot",
       {"graph", "axis", "curve", "plot"}},
      {"Variable Definition", "Introduces symbols for unknown quantities",
       {"let", "denote", "define"}},
      {"Equation Formulation", "Sets up equations from relations",
       {"equation", "formulate"}},
      {"Formula Derivation", "Transforms or rearranges formulas",
       {"derive", "rearrange", "rearranging"}},
      {"Knowledge Introduction", "Brings in known identities or theorems",
       {"recall", "theorem", "identity", "known fact"}},
      {"Calculation", "Carries out arithmetic",
       {"calculate", "compute", "multiply", "sum of", "product of"}},
      {"Approximation", "Estimates or rounds values",
       {"approximate", "approximately", "estimate", "round"}},
      {"Verification", "Checks earlier work for consistency",
       {"verify", "check", "consistent"}},
      {"Geometric Reasoning", "Reasons about shapes and measures",
       {"triangle", "angle", "circle", "perimeter", "radius"}},
      {"Conclusion Drawing", "States the final answer",
       {"final answer", "conclude", "therefore"}},
      {kUnclassified, "Reserved bucket for steps matching no category", {}},
  };
  return t;
}

std::vector<std::string> AbilityTaxonomy::validate_and_fix() {
  std::vector<std::string> errors;
  if (categories.empty()) {
    errors.push_back("taxonomy must declare at least one category");
  }
  std::set<std::string> seen;
  for (const auto& c : categories) {
    if (c.name.empty()) errors.push_back("category names must be nonempty");
    if (!seen.insert(c.name).second) errors.push_back("duplicate category name: " + c.name);
  }
  if (!seen.count(kUnclassified)) {
    categories.push_back({kUnclassified, "Reserved bucket for steps matching no category", {}});
  }
  return errors;
}

bool AbilityTaxonomy::has_category(const std::string& name) const {
  return std::any_of(categories.begin(), categories.end(),
                     [&](const AbilityCategory& c) { return c.name == name; });
}

AbilityTaxonomy AbilityTaxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open taxonomy file: " + path.string());
  nlohmann::json j;
  in >> j;
  AbilityTaxonomy t;
  t.version = j.value("version", "");
  for (const auto& jc : j.at("categories")) {
    AbilityCategory c;
    c.name = jc.at("name").get<std::string>();
    c.description = jc.value("description", "");
    if (jc.contains("patterns")) {
      c.patterns = jc.at("patterns").get<std::vector<std::string>>();
    }
    t.categories.push_back(std::move(c));
  }
  auto errors = t.validate_and_fix();
  if (!errors.empty()) {
    throw std::runtime_error("invalid taxonomy: " + errors.front());
  }
  return t;
}

void AbilityTaxonomy::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["version"] = version;
  nlohmann::json cats = nlohmann::json::array();
  for (const auto& c : categories) {
    cats.push_back({{"name", c.name}, {"description", c.description}, {"patterns", c.patterns}});
  }
  j["categories"] = std::move(cats);
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

std::string classify_step(const AtomicStep& step, const AbilityTaxonomy& taxonomy,
                          PolicyBackend* classifier, const TemplateStore* templates) {
  if (classifier && templates) {
    std::string category_list;
    for (const auto& c : taxonomy.categories) {
      category_list += "- " + c.name + (c.description.empty() ? "" : (": " + c.description)) + "\n";
    }
    PolicyRequest req;
    req.question.id = "classify";
    req.question.text = step.text;
    req.prompt_template_id = "ability_clustering";
    req.rendered_prompt = templates->render(
        "ability_clustering", {{"categories", category_list}, {"step", step.text}});
    req.max_length = 64;
    req.seed = derive_seed(fnv1a64("classify"), step.text);
    auto response = classifier->generate_step(req);
    if (response.ok()) {
      std::string reply = response.value().text;
      // Accept the first line that names a known category, case-insensitively.
      const std::string padded = padded_normal_form(reply);
      for (const auto& c : taxonomy.categories) {
        if (padded.find(padded_normal_form(c.name)) != std::string::npos) {
          return c.name;
        }
      }
      std::fprintf(stderr, "classify_step: reply named no known category, using keywords\n");
    } else {
      std::fprintf(stderr, "classify_step: classifier backend failed (%s), using keywords\n",
                   response.error().message.c_str());
    }
  }
  return keyword_classify(step.text, taxonomy);
}

EngineResult<UtilizationRecord> step_utilization(const Question& question,
                                                 std::span<const AtomicStep> prefix,
                                                 PolicyBackend& policy, int rollouts,
                                                 const std::string& gold,
                                                 const SearchConfig& config,
                                                 const AbilityTaxonomy* taxonomy,
                                                 std::vector<RolloutLog>* log) {
  if (rollouts < 1) {
    return EngineError{EngineErrorKind::BadInput, "rollouts must be >= 1"};
  }
  if (gold.empty()) {
    return EngineError{EngineErrorKind::MissingGold, "gold answer must be nonempty"};
  }

  UtilizationRecord record;
  record.question_id = question.id;
  record.prefix_length = static_cast<int>(prefix.size());
  if (!prefix.empty()) {
    record.ability_of_last_step =
        taxonomy ? classify_step(prefix.back(), *taxonomy) : std::string(kUnclassified);
  } else {
    record.ability_of_last_step = kUnclassified;
  }

  int completed = 0;
  for (int m = 0; m < rollouts; ++m) {
    SearchConfig cfg = config;
    cfg.seed = derive_seed(config.seed, question.id, fnv1a64("utilization"),
                           static_cast<uint64_t>(prefix.size()), static_cast<uint64_t>(m));
    const ReasoningChain chain = scot::run_scot(question, policy, cfg, prefix);
    const bool aborted = chain.termination.kind == TerminationKind::Aborted;
    const bool correct =
        chain.final_answer && scot::answers_match(*chain.final_answer, gold);
    if (!aborted) {
      completed += 1;
      if (correct) record.correct_count += 1;
    }
    if (log) {
      log->push_back({question.id, record.prefix_length, m, chain.final_answer, correct, aborted});
    }
  }
  if (completed == 0) {
    return EngineError{EngineErrorKind::AllRolloutsAborted,
                       "every continuation aborted for " + question.id};
  }
  if (completed < rollouts) {
    std::fprintf(stderr, "step_utilization: %d/%d continuations aborted for %s\n",
                 rollouts - completed, rollouts, question.id.c_str());
  }
  record.rollouts = completed;
  record.rate = static_cast<double>(record.correct_count) / static_cast<double>(completed);
  return record;
}

EngineResult<std::vector<AbilityScore>> ability_scores(
    std::span<const UtilizationRecord> records, const AbilityTaxonomy& taxonomy) {
  std::map<std::string, std::pair<int, double>> sums;  // name -> (count, sum)
  for (const auto& r : records) {
    if (!taxonomy.has_category(r.ability_of_last_step)) {
      return EngineError{EngineErrorKind::BadInput,
                         "unknown taxonomy category: " + r.ability_of_last_step};
    }
    auto& slot = sums[r.ability_of_last_step];
    slot.first += 1;
    slot.second += r.rate;
  }
  std::vector<AbilityScore> out;
  out.reserve(taxonomy.categories.size());
  for (const auto& c : taxonomy.categories) {
    AbilityScore score;
    score.category = c.name;
    if (auto it = sums.find(c.name); it != sums.end()) {
      score.member_count = it->second.first;
      score.score = it->second.second / it->second.first;
    }
    out.push_back(std::move(score));
  }
  return out;
}

std::vector<std::pair<std::string, double>> behavior_distribution(
    std::span<const ReasoningChain> chains, const AbilityTaxonomy& taxonomy) {
  std::map<std::string, long long> counts;
  long long total = 0;
  for (const auto& chain : chains) {
    for (const auto& step : chain.steps) {
      counts[classify_step(step, taxonomy)] += 1;
      total += 1;
    }
  }
  std::vector<std::pair<std::string, double>> out;
  if (total == 0) return out;
  for (const auto& c : taxonomy.categories) {
    if (auto it = counts.find(c.name); it != counts.end()) {
      out.emplace_back(c.name, static_cast<double>(it->second) / static_cast<double>(total));
    }
  }
  return out;
}

nlohmann::json to_json(const UtilizationRecord& r) {
  nlohmann::json j;
  j["question_id"] = r.question_id;
  j["prefix_length"] = r.prefix_length;
  j["rollouts"] = r.rollouts;
  j["correct_count"] = r.correct_count;
  j["rate"] = r.rate;
  j["ability_of_last_step"] = r.ability_of_last_step;
  return j;
}

UtilizationRecord utilization_record_from_json(const nlohmann::json& j) {
  UtilizationRecord r;
  r.question_id = j.at("question_id").get<std::string>();
  r.prefix_length = j.at("prefix_length").get<int>();
  r.rollouts = j.at("rollouts").get<int>();
  r.correct_count = j.at("correct_count").get<int>();
  r.rate = j.at("rate").get<double>();
  r.ability_of_last_step = j.at("ability_of_last_step").get<std::string>();
  return r;
}

nlohmann::json to_json(const RolloutLog& r) {
  nlohmann::json j;
  j["question_id"] = r.question_id;
  j["prefix_length"] = r.prefix_length;
  j["rollout_index"] = r.rollout_index;
  if (r.answer) j["answer"] = *r.answer;
  j["correct"] = r.correct;
  j["aborted"] = r.aborted;
  return j;
}

RolloutLog rollout_log_from_json(const nlohmann::json& j) {
  RolloutLog r;
  r.question_id = j.at("question_id").get<std::string>();
  r.prefix_length = j.at("prefix_length").get<int>();
  r.rollout_index = j.at("rollout_index").get<int>();
  if (j.contains("answer")) r.answer = j.at("answer").get<std::string>();
  r.correct = j.at("correct").get<bool>();
  r.aborted = j.at("aborted").get<bool>();
  return r;
}

}  // namespace atomcot::eval
