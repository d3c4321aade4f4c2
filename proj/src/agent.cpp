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

#include "starnav/agent.hpp"

#include <algorithm>
#include <string>

#include "starnav/error.hpp"

namespace starnav {

Decision decide(const Eigen::Ref<const Eigen::RowVectorXd>& logits, const ActionSpace& space, bool restricted) {
  Decision out;
  out.action_logits.reserve(space.entries.size());
  for (const auto& e : space.entries) {
    if (e.token < 0 || e.token >= logits.size()) throw Error(ErrorCode::ShapeError, "action token outside the logits");
    out.action_logits.push_back(logits(e.token));
  }
  if (restricted) {
    int best = 0;
    for (int i = 1; i < space.size(); ++i) {
      if (out.action_logits[i] > out.action_logits[best]) best = i;
    }
    out.target = space.entries[best].node;
    out.token = space.entries[best].token;
    return out;
  }
  Eigen::Index token = 0;
  logits.maxCoeff(&token);
  out.token = static_cast<int>(token);
  const auto it = std::find_if(space.entries.begin(), space.entries.end(),
                               [&](const ActionEntry& e) { return e.token == out.token; });
  if (it == space.entries.end()) {
    out.out_of_space = true;
    out.target.reset();
  } else {
    out.target = it->node;
  }
  return out;
}

template <class Scalar>
Decision ModelPolicy<Scalar>::decide(const StepContext& ctx) {
  if (!ctx.prompt || !ctx.affinity) throw Error(ErrorCode::InconsistentState, "model policy needs a prompt");
  const auto trace = forward(model_, *ctx.prompt, *ctx.affinity, ForwardMode::DecisionOnly);
  const Eigen::RowVectorXd logits = trace.logits.template cast<double>();
  return starnav::decide(logits, ctx.action_space, restricted_);
}

template class ModelPolicy<float>;
template class ModelPolicy<double>;

Decision OraclePolicy::decide(const StepContext& ctx) {
  const auto& path = ctx.episode.gt_path;
  const int here = ctx.graph.node(ctx.graph.current()).observation.vertex;
  const auto it = std::find(path.begin(), path.end(), here);
  if (it == path.end() || it + 1 == path.end()) return Decision::stop();
  const auto next = ctx.graph.find_vertex(*(it + 1));
  if (!next) return Decision::stop();
  const auto index = ctx.action_space.index_of(*next);
  if (!index) return Decision::stop();
  return Decision::move(next, ctx.action_space.entries[*index].token);
}

Decision NeverStopPolicy::decide(const StepContext& ctx) {
  if (ctx.action_space.size() < 2) return Decision::stop();
  return Decision::move(ctx.action_space.entries[1].node, ctx.action_space.entries[1].token);
}

Decision RandomPolicy::decide(const StepContext& ctx) {
  const auto& e = ctx.action_space.entries[rng_.below(ctx.action_space.size())];
  return Decision::move(e.node, e.token);
}

Decision ScriptedPolicy::decide(const StepContext& ctx) {
  if (next_ >= targets_.size()) return Decision::stop();
  const int vertex = targets_[next_++];
  if (vertex < 0) return Decision::stop();
  const auto node = ctx.graph.find_vertex(vertex);
  if (!node) throw Error(ErrorCode::InvalidMove, "scripted target vertex " + std::to_string(vertex) + " is not on the map");
  const auto index = ctx.action_space.index_of(*node);
  return Decision::move(node, index ? ctx.action_space.entries[*index].token : vocab::kPad);
}

ExecuteResult execute(TopoGraph& graph, const World& world, const Decision& decision) {
  ExecuteResult out;
  out.current = graph.current();
  out.traversed = {out.current};
  if (decision.is_stop()) return out;
  const NodeId target = *decision.target;
  if (!graph.contains(target)) {
    throw Error(ErrorCode::InvalidMove, "target node " + std::to_string(target.value) + " is not on the map");
  }
  const auto path = shortest_path(graph, out.current, target);
  for (std::size_t i = 1; i < path.size(); ++i) {
    out.length += *graph.edge_length(path[i - 1], path[i]);
    advance_map(world, graph, graph.node(path[i]).observation.vertex);
    out.traversed.push_back(path[i]);
  }
  out.current = graph.current();
  return out;
}

std::pair<PromptSequence, Eigen::MatrixXd> prepare_inputs(const Episode& episode, const TopoGraph& graph,
                                                          const ObservationBundle& observations,
                                                          const ActionSpace& space, const NavConfig& config) {
  PromptSequence prompt =
      build_inp(default_system_prompt(), episode.instruction, graph, observations, space, config.layout);
  Eigen::MatrixXd affinity = config.star_att ? expand_affinity(pairwise_distances(graph), prompt)
                                             : Eigen::MatrixXd::Zero(prompt.length(), prompt.length());
  return {std::move(prompt), std::move(affinity)};
}

Trajectory rollout(Policy& policy, const Episode& episode, const ObservationModel& observer, const NavConfig& config,
                   const StepCallback& on_step) {
  if (config.max_steps < 1) throw Error(ErrorCode::ConfigError, "max_steps must be at least 1");
  const World& world = *episode.world;
  Trajectory traj;
  TopoGraph graph;
  traj.nodes.push_back(advance_map(world, graph, episode.start));
  traj.vertices.push_back(episode.start);

  for (int step = 0; step < config.max_steps; ++step) {
    const ObservationBundle obs = observer.observe(world, graph);
    const ActionSpace space = build_action_space(graph, config.scope);
    std::optional<std::pair<PromptSequence, Eigen::MatrixXd>> inputs;
    if (policy.reads_prompt() || on_step) inputs = prepare_inputs(episode, graph, obs, space, config);
    const StepContext ctx{episode, graph, obs, space, inputs ? &inputs->first : nullptr,
                          inputs ? &inputs->second : nullptr, step};

    StepRecord record;
    record.step = step;
    record.snapshot = static_cast<int>(traj.snapshots.size());
    record.action_space = space;
    record.decision = policy.decide(ctx);
    if (record.decision.target && !space.contains(*record.decision.target)) {
      record.decision.out_of_space = true;
      record.decision.target.reset();
    }
    traj.snapshots.push_back(graph);

    if (record.decision.is_stop()) {
      record.traversed = {graph.current()};
      traj.stopped = true;
      if (on_step) on_step(ctx, record);
      traj.steps.push_back(std::move(record));
      break;
    }
    const NodeId origin = graph.current();
    record.geodesic_at_decision = pairwise_distances(graph)(origin.index(), record.decision.target->index());
    // The callback sees the map as it was at decision time.
    const StepContext before_ctx{episode, traj.snapshots.back(), obs, space, ctx.prompt, ctx.affinity, step};
    const ExecuteResult res = execute(graph, world, record.decision);
    record.traversed = res.traversed;
    record.traversed_length = res.length;
    traj.length += res.length;
    for (std::size_t i = 1; i < res.traversed.size(); ++i) {
      traj.nodes.push_back(res.traversed[i]);
      traj.vertices.push_back(graph.node(res.traversed[i]).observation.vertex);
    }
    if (on_step) on_step(before_ctx, record);
    traj.steps.push_back(std::move(record));
  }
  return traj;
}

}  // namespace starnav
