// Copyright (c) 2026 The StarNav Authors. All Rights Reserved.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "starnav/action_space.hpp"
#include "starnav/env.hpp"
#include "starnav/prompt.hpp"
#include "starnav/random.hpp"
#include "starnav/star_transformer.hpp"
#include "starnav/vocab.hpp"

namespace starnav {

/// How the map is presented to the policy; doubles as the ablation switches.
struct NavConfig {
  int max_steps = 15;
  ActionScope scope = ActionScope::Global;
  PromptLayout layout = PromptLayout::Interleaved;
  bool star_att = true;  // false: affinity forced to zero
};

struct Decision {
  std::optional<NodeId> target;  // nullopt = Stop
  int token = 0;                 // emitted action token
  bool out_of_space = false;     // unrestricted decode produced an illegal token; treated as Stop
  std::vector<double> action_logits;  // one per action-space entry, when a model decided

  bool is_stop() const { return !target.has_value(); }
  static Decision stop() { return move(std::nullopt, vocab::kStop); }
  static Decision move(std::optional<NodeId> target, int token) {
    Decision d;
    d.target = target;
    d.token = token;
    return d;
  }
};

/// Greedy decode over the logits. Restricted mode only considers the tokens of
/// `space` and breaks ties toward the lower action index; unrestricted mode
/// takes the vocabulary argmax and maps anything outside `space` to Stop.
Decision decide(const Eigen::Ref<const Eigen::RowVectorXd>& logits, const ActionSpace& space, bool restricted = true);

struct StepContext {
  const Episode& episode;
  const TopoGraph& graph;
  const ObservationBundle& observations;
  const ActionSpace& action_space;
  const PromptSequence* prompt;      // null when the policy does not read prompts
  const Eigen::MatrixXd* affinity;
  int step = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Decision decide(const StepContext& ctx) = 0;
  virtual bool reads_prompt() const { return false; }
};

template <class Scalar>
class ModelPolicy final : public Policy {
 public:
  explicit ModelPolicy(const StarModel<Scalar>& model, bool restricted = true)
      : model_(model), restricted_(restricted) {}
  Decision decide(const StepContext& ctx) override;
  bool reads_prompt() const override { return true; }

 private:
  const StarModel<Scalar>& model_;
  bool restricted_;
};

/// Replays the episode's ground-truth path.
class OraclePolicy final : public Policy {
 public:
  Decision decide(const StepContext& ctx) override;
};

class AlwaysStopPolicy final : public Policy {
 public:
  Decision decide(const StepContext&) override { return Decision::stop(); }
};

/// Moves to the first listed candidate whenever one exists.
class NeverStopPolicy final : public Policy {
 public:
  Decision decide(const StepContext& ctx) override;
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  Decision decide(const StepContext& ctx) override;

 private:
  Rng rng_;
};

/// Follows a fixed list of world-vertex targets (-1 = stop), then stops.
class ScriptedPolicy final : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<int> targets) : targets_(std::move(targets)) {}
  Decision decide(const StepContext& ctx) override;

 private:
  std::vector<int> targets_;
  std::size_t next_ = 0;
};

struct ExecuteResult {
  NodeId current;
  std::vector<NodeId> traversed;  // starts at the origin
  double length = 0.0;
};

/// Carries out a decision on the map: adjacent targets take one hop, others
/// follow the map's shortest path with an observe/update at every node.
ExecuteResult execute(TopoGraph& graph, const World& world, const Decision& decision);

struct StepRecord {
  int step = 0;
  int snapshot = 0;  // index into Trajectory::snapshots
  ActionSpace action_space;
  Decision decision;
  std::vector<NodeId> traversed;
  double traversed_length = 0.0;
  double geodesic_at_decision = 0.0;  // map distance origin -> target when the decision was made
};

struct Trajectory {
  std::vector<int> vertices;  // executed walk in world vertices, including backtracking
  std::vector<NodeId> nodes;  // same walk in map ids
  std::vector<StepRecord> steps;
  std::vector<TopoGraph> snapshots;  // map as seen at each decision
  bool stopped = false;
  double length = 0.0;
};

using StepCallback = std::function<void(const StepContext&, const StepRecord&)>;

/// observe -> update map -> action space -> prompt + affinity -> decide -> execute,
/// until Stop or `config.max_steps` decisions.
Trajectory rollout(Policy& policy, const Episode& episode, const ObservationModel& observer,
                   const NavConfig& config = {}, const StepCallback& on_step = {});

/// Prompt and affinity for one map state under the given ablation switches.
std::pair<PromptSequence, Eigen::MatrixXd> prepare_inputs(const Episode& episode, const TopoGraph& graph,
                                                          const ObservationBundle& observations,
                                                          const ActionSpace& space, const NavConfig& config);

}  // namespace starnav
