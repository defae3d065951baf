#include "atomcot/sim_env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "atomcot/scot_engine.hpp"
#include "atomcot/seeding.hpp"

namespace atomcot::sim {

namespace {

// One template per ability category (Conclusion Drawing is reserved for
// leaves). Placeholders: %a/%b/%c are node-unique salt numbers, %n the node
// id. Each text is a single sentence so the intra-step rule never fires, and
// templates share few enough tokens that any pair stays well below the
// inter-step threshold.
struct StepTemplate {
  const char* ability;
  const char* pattern;
};

constexpr StepTemplate kInternalTemplates[] = {
    {"Image Description", "The image shows a layout with v%a shaded cells around marker n%n."},
    {"Information Extraction", "From the problem statement we are given quantities v%a and v%b at n%n."},
    {"Graphs Analysis", "The graph exhibits a curve through v%a on the horizontal axis near n%n."},
    {"Variable Definition", "Let x%a denote the unknown quantity attached to n%n."},
    {"Equation Formulation", "Formulate the equation x%a plus v%b equals v%c for branch n%n."},
    {"Formula Derivation", "Derive x%a from v%c minus v%b by rearranging the balance at n%n."},
    {"Knowledge Introduction", "Recall the standard identity that bounds x%a below v%b at n%n."},
    {"Calculation", "Calculate the sum of v%a and v%b to obtain v%c at n%n."},
    {"Approximation", "Approximate the ratio of v%a to v%b as roughly v%c at n%n."},
    {"Verification", "Verify the partial value v%c remains within bound v%a at n%n."},
    {"Geometric Reasoning", "The triangle leg v%a meets the circle of radius v%b at n%n."},
};

constexpr const char* kLeafPattern = "We conclude branch n%n here. The final answer is %g.";

std::string render_step(const char* pattern, int node_id, const std::string& answer) {
  const long long a = 3LL * node_id + 1;
  const long long b = 3LL * node_id + 2;
  const long long c = 3LL * node_id + 3;
  std::string out;
  for (const char* p = pattern; *p; ++p) {
    if (*p != '%') {
      out += *p;
      continue;
    }
    ++p;
    switch (*p) {
      case 'a': out += std::to_string(a); break;
      case 'b': out += std::to_string(b); break;
      case 'c': out += std::to_string(c); break;
      case 'n': out += std::to_string(node_id); break;
      case 'g': out += answer; break;
      default: out += *p; break;
    }
  }
  return out;
}

std::string leaf_answer(int node_id) { return std::to_string(10 + node_id); }

void check_non_duplicative(const SynthTask& task) {
  std::vector<scot::TokenSet> tokens;
  tokens.reserve(task.nodes.size());
  for (const auto& n : task.nodes) tokens.push_back(scot::tokenize_for_similarity(n.text));
  for (size_t i = 1; i < task.nodes.size(); ++i) {
    for (size_t j = i + 1; j < task.nodes.size(); ++j) {
      const double sim = scot::jaccard(tokens[i], tokens[j]);
      if (sim >= 0.85) {
        throw std::logic_error("synthesized node texts are too similar: " + task.nodes[i].text +
                               " / " + task.nodes[j].text);
      }
    }
  }
}

}  // namespace

bool SynthTask::on_correct_path(int id) const {
  return std::find(correct_path.begin(), correct_path.end(), id) != correct_path.end();
}

std::vector<SynthTask> generate_tasks(int count, int branching, int depth, uint64_t seed) {
  if (branching < 2) throw std::invalid_argument("branching must be >= 2");
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  if (count < 0) throw std::invalid_argument("count must be >= 0");

  constexpr size_t kTemplateCount = std::size(kInternalTemplates);
  std::vector<SynthTask> tasks;
  tasks.reserve(static_cast<size_t>(count));
  for (int t = 0; t < count; ++t) {
    const uint64_t task_seed = derive_seed(seed, static_cast<uint64_t>(t));
    SynthTask task;
    char idbuf[48];
    std::snprintf(idbuf, sizeof(idbuf), "synth-%04d-%08llx", t,
                  static_cast<unsigned long long>(task_seed & 0xffffffffull));
    task.id = idbuf;
    task.branching = branching;
    task.depth = depth;

    task.nodes.push_back(TreeNode{0, "", {}});
    // Complete tree, breadth-first; level of a node is recovered from its id.
    std::vector<int> frontier{0};
    for (int level = 1; level <= depth; ++level) {
      std::vector<int> next;
      for (int parent : frontier) {
        for (int k = 0; k < branching; ++k) {
          const int id = static_cast<int>(task.nodes.size());
          task.nodes.push_back(TreeNode{id, "", {}});
          task.nodes[static_cast<size_t>(parent)].children.push_back(id);
          next.push_back(id);
        }
      }
      frontier = std::move(next);
    }

    Rng path_rng(derive_seed(task_seed, fnv1a64("correct-path")));
    task.correct_path.push_back(0);
    int cursor = 0;
    for (int level = 1; level <= depth; ++level) {
      const auto& kids = task.nodes[static_cast<size_t>(cursor)].children;
      cursor = kids[static_cast<size_t>(path_rng.below(kids.size()))];
      task.correct_path.push_back(cursor);
    }

    // Rotate templates by node id and task index so every ability keyword
    // appears across a batch of tasks.
    for (auto& node : task.nodes) {
      if (node.id == 0) continue;
      if (node.children.empty()) {
        node.text = render_step(kLeafPattern, node.id, leaf_answer(node.id));
      } else {
        const size_t pick = (static_cast<size_t>(node.id) + static_cast<size_t>(t)) % kTemplateCount;
        node.text = render_step(kInternalTemplates[pick].pattern, node.id, "");
      }
    }
    task.gold_answer = leaf_answer(task.correct_path.back());
    check_non_duplicative(task);
    tasks.push_back(std::move(task));
  }
  return tasks;
}

Question question_for(const SynthTask& task) {
  Question q;
  q.id = task.id;
  q.text = "Synthetic reasoning task " + task.id +
           ": traverse the hidden decision tree one step at a time and report the "
           "final quantity.";
  q.gold_answer = task.gold_answer;
  return q;
}

std::optional<int> resolve_path(const SynthTask& task, std::span<const std::string> step_texts) {
  int cursor = 0;
  for (const auto& text : step_texts) {
    const auto& kids = task.node(cursor).children;
    int next = -1;
    for (int kid : kids) {
      if (task.node(kid).text == text) {
        next = kid;
        break;
      }
    }
    if (next < 0) return std::nullopt;
    cursor = next;
  }
  return cursor;
}

std::vector<double> mock_child_logits(const SynthTask& task, int node_id,
                                      const NoiseSpec& noise) {
  const auto& kids = task.node(node_id).children;
  const size_t b = kids.size();
  std::vector<double> logits(b, -std::numeric_limits<double>::infinity());

  int correct_child = -1;
  if (task.on_correct_path(node_id)) {
    for (size_t i = 0; i + 1 < task.correct_path.size(); ++i) {
      if (task.correct_path[i] == node_id) {
        correct_child = task.correct_path[i + 1];
        break;
      }
    }
  }

  for (size_t i = 0; i < b; ++i) {
    double weight;
    if (correct_child < 0) {
      weight = 1.0 / static_cast<double>(b);
    } else if (kids[i] == correct_child) {
      weight = noise.policy_correct_bias;
    } else {
      weight = (1.0 - noise.policy_correct_bias) / static_cast<double>(b - 1);
    }
    // Tie-break jitter, deterministic per (task, node, child), small enough
    // to never disturb a real weight gap.
    Rng jitter(derive_seed(fnv1a64(task.id), fnv1a64("jitter"),
                           static_cast<uint64_t>(node_id), static_cast<uint64_t>(kids[i])));
    if (weight > 0.0) {
      logits[i] = std::log(weight) + 1e-9 * jitter.uniform01();
    }
  }
  return logits;
}

SimPolicyBackend::SimPolicyBackend(std::vector<SynthTask> tasks, NoiseSpec noise)
    : noise_(noise) {
  for (auto& t : tasks) {
    const std::string key = t.id;
    tasks_.emplace(key, std::move(t));
  }
}

std::string SimPolicyBackend::id() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "sim-policy:tasks=%zu;bias=%.3f", tasks_.size(),
                noise_.policy_correct_bias);
  return buf;
}

BackendResult<PolicyResponse> SimPolicyBackend::do_generate(const PolicyRequest& req) {
  auto it = tasks_.find(req.question.id);
  if (it == tasks_.end()) {
    return BackendError{BackendErrorKind::Refusal,
                        "unknown question id: " + req.question.id};
  }
  const SynthTask& task = it->second;
  const auto node = resolve_path(task, req.history);
  if (!node) {
    return BackendError{BackendErrorKind::Refusal, "history does not match the task tree"};
  }
  if (task.is_leaf(*node)) {
    return BackendError{BackendErrorKind::Refusal, "history already reached a leaf"};
  }

  const auto logits = mock_child_logits(task, *node, noise_);
  const auto& kids = task.node(*node).children;

  size_t pick = 0;
  if (req.temperature <= 0.0) {
    pick = static_cast<size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
  } else {
    // Softmax at the request temperature, sampled with the request seed.
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    std::vector<double> cumulative(logits.size(), 0.0);
    double total = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
      const double p = std::isinf(logits[i])
                           ? 0.0
                           : std::exp((logits[i] - max_logit) / req.temperature);
      total += p;
      cumulative[i] = total;
    }
    Rng rng(derive_seed(req.seed, fnv1a64(task.id), static_cast<uint64_t>(*node)));
    const double u = rng.uniform01() * total;
    while (pick + 1 < cumulative.size() && u >= cumulative[pick]) ++pick;
  }

  const TreeNode& chosen = task.node(kids[pick]);
  PolicyResponse resp;
  resp.text = chosen.text;
  resp.finish_flag = task.is_leaf(chosen.id);
  return resp;
}

SimRewardBackend::SimRewardBackend(std::vector<SynthTask> tasks, NoiseSpec noise,
                                   uint64_t noise_seed)
    : tasks_(std::move(tasks)), noise_(noise), noise_seed_(noise_seed) {
  for (const auto& t : tasks_) {
    by_question_text_.emplace(question_for(t).text, &t);
  }
}

std::string SimRewardBackend::id() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "sim-reward:tasks=%zu;sigma=%.3f", tasks_.size(),
                noise_.reward_noise_sigma);
  return buf;
}

BackendResult<StepScore> SimRewardBackend::do_score(const RewardRequest& req) {
  const SynthTask* task = nullptr;
  if (auto it = by_question_text_.find(req.question_text); it != by_question_text_.end()) {
    task = it->second;
  }
  if (!task) {
    return BackendError{BackendErrorKind::Refusal,
                        "question text does not match any task"};
  }

  double base = 0.0;
  uint64_t node_key = fnv1a64(req.candidate);
  if (auto parent = resolve_path(*task, req.history)) {
    for (int kid : task->node(*parent).children) {
      if (task->node(kid).text == req.candidate) {
        node_key = static_cast<uint64_t>(kid);
        base = task->on_correct_path(kid) ? 1.0 : 0.0;
        break;
      }
    }
  }

  double value = base;
  if (noise_.reward_noise_sigma > 0.0) {
    // One draw per (task, node, seed): replaying a node always yields the
    // same noise, which keeps search and brute-force enumeration comparable.
    Rng rng(derive_seed(noise_seed_, fnv1a64(task->id), node_key));
    value = std::clamp(base + noise_.reward_noise_sigma * rng.gaussian(), 0.0, 1.0);
  }

  StepScore score;
  score.step_index = static_cast<int>(req.history.size());
  score.value = value;
  return score;
}

EngineResult<BruteForceResult> brute_force_best(const SynthTask& task, RewardBackend& reward,
                                                Aggregation aggregation) {
  double leaf_estimate = 1.0;
  for (int i = 0; i < task.depth; ++i) leaf_estimate *= task.branching;
  if (leaf_estimate > 100000.0) {
    return EngineError{EngineErrorKind::TreeTooLarge,
                       "tree has more than 100000 leaves"};
  }

  const std::string question_text = question_for(task).text;
  BruteForceResult best;
  bool found = false;

  std::vector<int> path;  // node ids below the root
  std::vector<std::string> texts;
  std::vector<double> scores;

  auto aggregate = [&](const std::vector<double>& vals) {
    switch (aggregation) {
      case Aggregation::Min: return *std::min_element(vals.begin(), vals.end());
      case Aggregation::Last: return vals.back();
      case Aggregation::Avg: {
        double sum = 0.0;
        for (double v : vals) sum += v;
        return sum / static_cast<double>(vals.size());
      }
    }
    return 0.0;
  };

  std::function<void(int)> visit = [&](int node_id) {
    const auto& kids = task.node(node_id).children;
    if (kids.empty()) {
      best.paths_enumerated += 1;
      const double total = aggregate(scores);
      if (!found || total > best.score) {
        found = true;
        best.score = total;
        best.leaf_id = node_id;
        best.path = path;
      }
      return;
    }
    for (int kid : kids) {
      RewardRequest req{question_text, texts, task.node(kid).text};
      auto scored = reward.score_step(req);
      if (!scored.ok()) {
        throw std::runtime_error("reward backend failed during enumeration: " +
                                 scored.error().message);
      }
      path.push_back(kid);
      texts.push_back(task.node(kid).text);
      scores.push_back(scored.value().value);
      visit(kid);
      path.pop_back();
      texts.pop_back();
      scores.pop_back();
    }
  };

  try {
    visit(0);
  } catch (const std::runtime_error& e) {
    return EngineError{EngineErrorKind::BackendFailure, e.what()};
  }
  return best;
}

nlohmann::json to_json(const SynthTask& task) {
  nlohmann::json j;
  j["id"] = task.id;
  j["branching"] = task.branching;
  j["depth"] = task.depth;
  j["gold_answer"] = task.gold_answer;
  j["correct_path"] = task.correct_path;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : task.nodes) {
    nlohmann::json jn;
    jn["id"] = n.id;
    jn["text"] = n.text;
    jn["children"] = n.children;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

SynthTask task_from_json(const nlohmann::json& j) {
  SynthTask task;
  task.id = j.at("id").get<std::string>();
  task.branching = j.at("branching").get<int>();
  task.depth = j.at("depth").get<int>();
  task.gold_answer = j.at("gold_answer").get<std::string>();
  task.correct_path = j.at("correct_path").get<std::vector<int>>();
  for (const auto& jn : j.at("nodes")) {
    TreeNode n;
    n.id = jn.at("id").get<int>();
    n.text = jn.at("text").get<std::string>();
    n.children = jn.at("children").get<std::vector<int>>();
    task.nodes.push_back(std::move(n));
  }
  if (task.nodes.empty() || task.correct_path.empty() || task.correct_path.front() != 0) {
    throw std::runtime_error("malformed synth task record");
  }
  for (size_t i = 0; i < task.nodes.size(); ++i) {
    if (task.nodes[i].id != static_cast<int>(i)) {
      throw std::runtime_error("synth task nodes must be indexed by id");
    }
  }
  return task;
}

}  // namespace atomcot::sim
