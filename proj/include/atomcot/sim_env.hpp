#pragma once

/**
 * Synthetic reasoning environments with known ground truth.
 *
 * A SynthTask is a complete b-ary tree of depth d. Node 0 is a virtual root;
 * every other node carries a one-sentence step text, leaves carry a
 * concluding sentence with a unique numeric answer, and exactly one
 * root-to-leaf path is correct. Step texts are templated to exercise every
 * ability-taxonomy keyword and are pairwise non-duplicative under Jaccard,
 * so the anomaly rules never trigger on clean runs.
 *
 * The mock policy puts probability mass `policy_correct_bias` on the correct
 * child (uniform elsewhere), rescaled by the request temperature:
 * temperature 0 takes the argmax logit, higher temperatures flatten the
 * distribution. The oracle reward returns 1.0 on-path / 0.0 off-path plus
 * Gaussian noise drawn once per (node, seed) and clamped to [0,1], so search
 * and brute force always see identical values.
 *
 * Everything here is a pure function of (inputs, seed).
 */

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomcot/backends.hpp"
#include "atomcot/core_types.hpp"
#include "atomcot/expected.hpp"

namespace atomcot::sim {

struct TreeNode {
  int id = 0;
  std::string text;
  std::vector<int> children;
};

struct SynthTask {
  std::string id;
  std::vector<TreeNode> nodes;    // nodes[i].id == i; nodes[0] is the root
  std::vector<int> correct_path;  // node ids, root first, leaf last
  std::string gold_answer;
  int branching = 0;
  int depth = 0;

  const TreeNode& node(int id) const { return nodes[static_cast<size_t>(id)]; }
  bool is_leaf(int id) const { return node(id).children.empty(); }
  bool on_correct_path(int id) const;
};

struct NoiseSpec {
  double reward_noise_sigma = 0.0;
  double policy_correct_bias = 1.0;
};

/// Deterministic in `seed`. Throws std::invalid_argument unless
/// branching >= 2 and depth >= 1.
std::vector<SynthTask> generate_tasks(int count, int branching, int depth, uint64_t seed);

/// The Question presented to backends for this task; gold_answer is set.
Question question_for(const SynthTask& task);

/// Walks the tree from the root matching each text exactly; returns the node
/// reached, or nullopt if any text is not the next child of the walk.
std::optional<int> resolve_path(const SynthTask& task, std::span<const std::string> step_texts);

/// Per-child sampling logits at a node: log(weight) plus a tiny
/// deterministic jitter that breaks argmax ties.
std::vector<double> mock_child_logits(const SynthTask& task, int node_id,
                                      const NoiseSpec& noise);

/// Policy backend over a set of tasks, routed by question id.
class SimPolicyBackend : public PolicyBackend {
 public:
  SimPolicyBackend(std::vector<SynthTask> tasks, NoiseSpec noise);

  std::string id() const override;

 protected:
  BackendResult<PolicyResponse> do_generate(const PolicyRequest& req) override;

 private:
  std::map<std::string, SynthTask> tasks_;
  NoiseSpec noise_;
};

/// Oracle reward over a set of tasks, routed by question text. `noise_seed`
/// fixes the per-node noise draws.
class SimRewardBackend : public RewardBackend {
 public:
  SimRewardBackend(std::vector<SynthTask> tasks, NoiseSpec noise, uint64_t noise_seed);

  std::string id() const override;

 protected:
  BackendResult<StepScore> do_score(const RewardRequest& req) override;

 private:
  std::map<std::string, const SynthTask*> by_question_text_;
  std::vector<SynthTask> tasks_;
  NoiseSpec noise_;
  uint64_t noise_seed_;
};

struct BruteForceResult {
  int leaf_id = -1;
  double score = 0.0;
  std::vector<int> path;  // node ids, root excluded
  int paths_enumerated = 0;
};

/// Enumerates every root-to-leaf path, scores every step with `reward`, and
/// returns the argmax of the aggregation (ties keep the first path in
/// child-order DFS). Refuses trees with more than 100000 leaves.
EngineResult<BruteForceResult> brute_force_best(const SynthTask& task, RewardBackend& reward,
                                                Aggregation aggregation);

nlohmann::json to_json(const SynthTask& task);
SynthTask task_from_json(const nlohmann::json& j);

}  // namespace atomcot::sim
