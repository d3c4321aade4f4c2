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

#include <span>
#include <string>
#include <vector>

#include "starnav/agent.hpp"
#include "starnav/env.hpp"

namespace starnav {

struct EpisodeRecord {
  int episode_id = 0;
  double trajectory_length = 0.0;  // TL, meters
  double navigation_error = 0.0;   // NE, meters
  bool success = false;
  bool oracle_success = false;
  double spl = 0.0;  // [0, 1]
  bool stopped = false;
};

struct MetricsReport {
  std::vector<EpisodeRecord> episodes;
  int count = 0;
  double tl = 0.0;
  double ne = 0.0;
  double sr = 0.0;   // percent
  double osr = 0.0;  // percent
  double spl = 0.0;  // percent
};

inline constexpr double kSuccessRadius = 3.0;

/// NE and oracle success use world geodesic distance. SPL = success * l / max(l, TL)
/// with l the start-goal geodesic; l = 0 with success counts as 1.
EpisodeRecord score_episode(const Trajectory& trajectory, const Episode& episode,
                            double success_radius = kSuccessRadius);

/// Same, from a bare vertex walk.
EpisodeRecord score_walk(std::span<const int> walk, bool stopped, const Episode& episode,
                         double success_radius = kSuccessRadius);

MetricsReport aggregate(std::span<const EpisodeRecord> records);

std::string format_report(const MetricsReport& report);

}  // namespace starnav
