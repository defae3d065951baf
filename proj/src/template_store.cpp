#include "atomcot/template_store.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace atomcot {

namespace {

struct BuiltinTemplate {
  const char* id;
  const char* text;
};

const BuiltinTemplate kBuiltins[] = {
    {"scot_step",
     "You are solving a problem through a sequence of minimal reasoning steps.\n"
     "Produce exactly ONE next atomic step: a single short thought that advances\n"
     "the solution. Do not produce more than one step. Do not repeat earlier\n"
     "steps. When the historical steps already determine the answer, output a\n"
     "concluding step ending with \"The final answer is [answer]\".\n"
     "\n"
     "Question: {question}\n"
     "\n"
     "Historical steps:\n"
     "{history}\n"
     "\n"
     "Next step:"},
    {"prm_score",
     "You are a process reward model. Given a question, the historical\n"
     "reasoning steps and one candidate step (steps are separated by five\n"
     "newline characters), reply with a single number in [0,1]: the\n"
     "probability that the candidate step is correct."},
    {"long_cot_dynamic",
     "You are building a reasoning path one node at a time. Each node has a\n"
     "previous stage, a current state and an action you choose: continue\n"
     "(keep reasoning), verify (check the work so far) or conclude (state the\n"
     "final answer). Reply in exactly this form:\n"
     "ACTION: continue|verify|conclude\n"
     "STEP: <one short reasoning step; when concluding, end with \"The final\n"
     "answer is [answer]\">\n"
     "\n"
     "Question: {question}\n"
     "\n"
     "Previous stage:\n"
     "{previous_stage}\n"
     "\n"
     "Current state:\n"
     "{current_state}"},
    {"short_cot_augment",
     "Rewrite the given solution as a sequence of minimal atomic reasoning\n"
     "steps. Each step must be one short self-contained thought; do not merge\n"
     "thoughts and do not repeat a step. Separate consecutive steps with five\n"
     "newline characters and nothing else. The last step must end with \"The\n"
     "final answer is [answer]\".\n"
     "\n"
     "Question: {question}\n"
     "\n"
     "Original solution:\n"
     "{short_cot}"},
    {"review_filter",
     "You review a machine-generated step-by-step solution. Reject it if any\n"
     "step is wrong, irrelevant or repeated, or if the final answer does not\n"
     "follow from the steps. Reply in exactly this form:\n"
     "VERDICT: accept|reject\n"
     "REASON: <one line>\n"
     "\n"
     "Question: {question}\n"
     "\n"
     "Solution steps:\n"
     "{steps}\n"
     "\n"
     "Final answer: {answer}"},
    {"quality_scoring",
     "Rate the following step-by-step solution for correctness, atomicity of\n"
     "steps and clarity. Reply with a single integer score from 0 to 100.\n"
     "\n"
     "Question: {question}\n"
     "\n"
     "Solution:\n"
     "{steps}"},
    {"ability_clustering",
     "Classify the reasoning step below into exactly one of these ability\n"
     "categories:\n"
     "{categories}\n"
     "Reply with the category name only, nothing else.\n"
     "\n"
     "Step: {step}"},
};

}  // namespace

TemplateStore TemplateStore::builtin() {
  TemplateStore store;
  for (const auto& t : kBuiltins) {
    store.templates_[t.id] = t.text;
  }
  return store;
}

TemplateStore TemplateStore::from_dir(const std::filesystem::path& dir) {
  TemplateStore store = builtin();
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("template directory does not exist: " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::ostringstream body;
    body << in.rdbuf();
    std::string text = body.str();
    // Files end with a trailing newline that is not part of the prompt.
    if (!text.empty() && text.back() == '\n') text.pop_back();
    store.templates_[entry.path().stem().string()] = std::move(text);
  }
  return store;
}

const std::string& TemplateStore::raw(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) {
    throw std::runtime_error("unknown template id: " + id);
  }
  return it->second;
}

std::string TemplateStore::render(const std::string& id,
                                  const std::map<std::string, std::string>& vars) const {
  const std::string& tmpl = raw(id);
  std::string out;
  out.reserve(tmpl.size());
  size_t pos = 0;
  while (pos < tmpl.size()) {
    const size_t open = tmpl.find('{', pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, open - pos);
    const size_t close = tmpl.find('}', open);
    if (close == std::string::npos) {
      out.append(tmpl, open, std::string::npos);
      break;
    }
    const std::string key = tmpl.substr(open + 1, close - open - 1);
    auto it = vars.find(key);
    if (it != vars.end()) {
      out += it->second;
    } else {
      out.append(tmpl, open, close - open + 1);
    }
    pos = close + 1;
  }
  return out;
}

std::vector<std::string> TemplateStore::ids() const {
  std::vector<std::string> out;
  out.reserve(templates_.size());
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

}  // namespace atomcot
