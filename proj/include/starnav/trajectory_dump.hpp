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

#include <string>
#include <vector>

#include "starnav/agent.hpp"
#include "starnav/metrics.hpp"
#include "starnav/serialization.hpp"

namespace starnav {

struct DumpStep {
  int step = 0;
  int snapshot = 0;  // index into TrajectoryDump::snapshots
  std::vector<std::string> prompt;  // rendered, one line per segment
  ActionSpace action_space;
  Decision decision;
  std::vector<NodeId> traversed;
  double traversed_length = 0.0;
  double geodesic_at_decision = 0.0;
};

/// Step-by-step record of one rollout. Map snapshots are stored once and
/// referenced by index from each step.
struct TrajectoryDump {
  int episode_id = 0;
  int world_id = 0;
  int start = 0;
  int goal = 0;
  std::vector<int> instruction;
  std::vector<int> gt_path;
  std::string policy;
  std::vector<TopoGraph> snapshots;
  std::vector<DumpStep> steps;
  std::vector<int> walk;
  bool stopped = false;
  double length = 0.0;
  EpisodeRecord record;
};

TrajectoryDump record_rollout(Policy& policy, const std::string& policy_name, const Episode& episode,
                              const ObservationModel& observer, const NavConfig& nav,
                              double success_radius = kSuccessRadius);

json to_json(const TrajectoryDump& dump);
TrajectoryDump trajectory_dump_from_json(const json& j);

ActionSpace action_space_from_json(const json& j);
Decision decision_from_json(const json& j);

}  // namespace starnav
