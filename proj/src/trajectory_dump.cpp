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

#include "starnav/trajectory_dump.hpp"

#include <sstream>

#include "starnav/error.hpp"
#include "starnav/prompt.hpp"

namespace starnav {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

json node_list(const std::vector<NodeId>& ids) {
  json out = json::array();
  for (NodeId n : ids) out.push_back(n.value);
  return out;
}

std::vector<NodeId> node_list_from_json(const json& j) {
  std::vector<NodeId> out;
  for (const auto& v : j) out.push_back(NodeId{v.get<int>()});
  return out;
}

std::optional<NodeId> optional_node_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return NodeId{j.get<int>()};
}

}  // namespace

ActionSpace action_space_from_json(const json& j) {
  ActionSpace space;
  for (const auto& e : j) {
    if (e.at("index").get<std::size_t>() != space.entries.size()) {
      throw Error(ErrorCode::InconsistentState, "action space entries out of order");
    }
    space.entries.push_back({optional_node_from_json(e.at("node")), e.at("token").get<int>()});
  }
  return space;
}

Decision decision_from_json(const json& j) {
  Decision d = Decision::move(optional_node_from_json(j.at("target")), j.at("token").get<int>());
  d.out_of_space = j.at("out_of_space").get<bool>();
  d.action_logits = j.at("action_logits").get<std::vector<double>>();
  return d;
}

TrajectoryDump record_rollout(Policy& policy, const std::string& policy_name, const Episode& episode,
                              const ObservationModel& observer, const NavConfig& nav, double success_radius) {
  TrajectoryDump dump;
  dump.episode_id = episode.id;
  dump.world_id = episode.world_id;
  dump.start = episode.start;
  dump.goal = episode.goal;
  dump.instruction = episode.instruction;
  dump.gt_path = episode.gt_path;
  dump.policy = policy_name;

  std::vector<std::vector<std::string>> prompts;
  const Trajectory traj = rollout(policy, episode, observer, nav, [&](const StepContext& ctx, const StepRecord&) {
    if (ctx.prompt) {
      prompts.push_back(split_lines(render_prompt(*ctx.prompt)));
    } else {
      const auto [prompt, affinity] = prepare_inputs(episode, ctx.graph, ctx.observations, ctx.action_space, nav);
      prompts.push_back(split_lines(render_prompt(prompt)));
    }
  });
  dump.snapshots = traj.snapshots;
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const StepRecord& r = traj.steps[i];
    DumpStep s;
    s.step = r.step;
    s.snapshot = r.snapshot;
    s.prompt = i < prompts.size() ? prompts[i] : std::vector<std::string>{};
    s.action_space = r.action_space;
    s.decision = r.decision;
    s.traversed = r.traversed;
    s.traversed_length = r.traversed_length;
    s.geodesic_at_decision = r.geodesic_at_decision;
    dump.steps.push_back(std::move(s));
  }
  dump.walk = traj.vertices;
  dump.stopped = traj.stopped;
  dump.length = traj.length;
  dump.record = score_episode(traj, episode, success_radius);
  return dump;
}

json to_json(const TrajectoryDump& d) {
  json snapshots = json::array();
  for (const auto& g : d.snapshots) snapshots.push_back(to_json(g));
  json steps = json::array();
  for (const auto& s : d.steps) {
    steps.push_back({{"step", s.step},
                     {"snapshot", s.snapshot},
                     {"prompt", s.prompt},
                     {"action_space", to_json(s.action_space)},
                     {"decision", to_json(s.decision)},
                     {"traversed", node_list(s.traversed)},
                     {"traversed_length", s.traversed_length},
                     {"geodesic_at_decision", s.geodesic_at_decision}});
  }
  return {{"schema", kSchemaVersion},
          {"kind", "trajectory"},
          {"episode_id", d.episode_id},
          {"world_id", d.world_id},
          {"start", d.start},
          {"goal", d.goal},
          {"instruction", d.instruction},
          {"gt_path", d.gt_path},
          {"policy", d.policy},
          {"snapshots", snapshots},
          {"steps", steps},
          {"walk", d.walk},
          {"stopped", d.stopped},
          {"length", d.length},
          {"record", to_json(d.record)}};
}

TrajectoryDump trajectory_dump_from_json(const json& j) {
  check_schema(j, "trajectory dump");
  TrajectoryDump d;
  d.episode_id = j.at("episode_id").get<int>();
  d.world_id = j.at("world_id").get<int>();
  d.start = j.at("start").get<int>();
  d.goal = j.at("goal").get<int>();
  d.instruction = j.at("instruction").get<std::vector<int>>();
  d.gt_path = j.at("gt_path").get<std::vector<int>>();
  d.policy = j.at("policy").get<std::string>();
  for (const auto& g : j.at("snapshots")) d.snapshots.push_back(graph_from_json(g));
  for (const auto& s : j.at("steps")) {
    DumpStep step;
    step.step = s.at("step").get<int>();
    step.snapshot = s.at("snapshot").get<int>();
    if (step.snapshot < 0 || step.snapshot >= static_cast<int>(d.snapshots.size())) {
      throw Error(ErrorCode::InconsistentState, "step refers to a missing snapshot");
    }
    step.prompt = s.at("prompt").get<std::vector<std::string>>();
    step.action_space = action_space_from_json(s.at("action_space"));
    step.decision = decision_from_json(s.at("decision"));
    step.traversed = node_list_from_json(s.at("traversed"));
    step.traversed_length = s.at("traversed_length").get<double>();
    step.geodesic_at_decision = s.at("geodesic_at_decision").get<double>();
    d.steps.push_back(std::move(step));
  }
  d.walk = j.at("walk").get<std::vector<int>>();
  d.stopped = j.at("stopped").get<bool>();
  d.length = j.at("length").get<double>();
  d.record = episode_record_from_json(j.at("record"));
  return d;
}

}  // namespace starnav
