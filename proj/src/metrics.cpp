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

#include "starnav/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "starnav/error.hpp"

namespace starnav {

EpisodeRecord score_walk(std::span<const int> walk, bool stopped, const Episode& episode, double success_radius) {
  const World& world = *episode.world;
  if (walk.empty()) throw Error(ErrorCode::InvalidTrajectory, "empty trajectory");
  if (walk.front() != episode.start) throw Error(ErrorCode::InvalidTrajectory, "trajectory does not begin at the start node");
  EpisodeRecord r;
  r.episode_id = episode.id;
  r.stopped = stopped;
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < walk.size(); ++i) {
    if (walk[i] < 0 || walk[i] >= world.size()) throw Error(ErrorCode::InvalidTrajectory, "vertex outside world");
    if (i > 0) {
      const auto w = world.edge_length(walk[i - 1], walk[i]);
      if (!w) throw Error(ErrorCode::InvalidTrajectory, "consecutive trajectory nodes are not adjacent in the world");
      r.trajectory_length += *w;
    }
    closest = std::min(closest, world.geodesic(walk[i], episode.goal));
  }
  r.navigation_error = world.geodesic(walk.back(), episode.goal);
  r.success = stopped && r.navigation_error < success_radius;
  r.oracle_success = closest < success_radius;
  const double shortest = world.geodesic(episode.start, episode.goal);
  if (r.success) {
    const double denom = std::max(shortest, r.trajectory_length);
    r.spl = denom > 0.0 ? shortest / denom : 1.0;
  }
  return r;
}

EpisodeRecord score_episode(const Trajectory& trajectory, const Episode& episode, double success_radius) {
  return score_walk(trajectory.vertices, trajectory.stopped, episode, success_radius);
}

MetricsReport aggregate(std::span<const EpisodeRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyEvaluation, "no episodes to aggregate");
  MetricsReport m;
  m.episodes.assign(records.begin(), records.end());
  m.count = static_cast<int>(records.size());
  for (const auto& r : records) {
    m.tl += r.trajectory_length;
    m.ne += r.navigation_error;
    m.sr += r.success ? 1.0 : 0.0;
    m.osr += r.oracle_success ? 1.0 : 0.0;
    m.spl += r.spl;
  }
  const double n = static_cast<double>(m.count);
  m.tl /= n;
  m.ne /= n;
  m.sr *= 100.0 / n;
  m.osr *= 100.0 / n;
  m.spl *= 100.0 / n;
  return m;
}

std::string format_report(const MetricsReport& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "episodes  TL(m)   NE(m)   SR      OSR     SPL\n"
                "%-9d %-7.2f %-7.2f %-7.2f %-7.2f %-7.2f\n",
                m.count, m.tl, m.ne, m.sr, m.osr, m.spl);
  return buf;
}

}  // namespace starnav
