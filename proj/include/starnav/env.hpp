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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "starnav/graph_algo.hpp"
#include "starnav/topo_graph.hpp"

namespace starnav {

struct WorldConfig {
  int num_nodes = 12;
  double box_size = 20.0;  // meters, square
  int num_landmarks = 24;
  double min_separation = 2.0;
  double target_degree = 3.0;
  int max_attempts = 200;
};

/// Ground-truth environment graph. Edge lengths are Euclidean distances.
struct World {
  std::uint64_t seed = 0;
  std::vector<Eigen::Vector2d> positions;
  graph::Adjacency adjacency;
  std::vector<int> landmarks;
  Eigen::MatrixXd geodesic;  // all-pairs, filled by finalize()

  int size() const { return static_cast<int>(positions.size()); }
  std::optional<double> edge_length(int a, int b) const;
  double average_degree() const;
  /// Recomputes derived data; call after filling positions/adjacency by hand.
  void finalize();
};

World generate_world(std::uint64_t seed, const WorldConfig& config);

/// Builds a world from explicit positions and an edge list (scripted scenarios, tests).
World make_world(std::vector<Eigen::Vector2d> positions, const std::vector<std::pair<int, int>>& edges,
                 std::vector<int> landmarks, std::uint64_t seed = 0);

struct Episode {
  int id = 0;
  std::shared_ptr<const World> world;
  int world_id = 0;
  int start = 0;
  int goal = 0;
  std::vector<int> instruction;  // vocabulary token ids
  std::vector<int> gt_path;      // world vertices, start..goal
  std::uint64_t seed = 0;
};

struct EpisodeConfig {
  int min_path_nodes = 3;
  int max_path_nodes = 7;
  int max_attempts = 1000;
};

Episode generate_episode(std::shared_ptr<const World> world, std::uint64_t seed,
                         const EpisodeConfig& config = {});

/// "go to <lm>, then <lm>, ..., stop at <lm>" over the interior and goal of `path`.
std::vector<int> make_instruction(const World& world, const std::vector<int>& path);

/// 0..bins-1 bucket of the yaw from `from` to `to`, measured counter-clockwise from +x.
int bearing_bin(const Eigen::Vector2d& from, const Eigen::Vector2d& to, int bins = 12);

struct ObservationConfig {
  int d_obs = 32;
  int panorama_tokens = 4;
  int view_tokens = 2;
  int max_views = 3;
  int bearing_bins = 12;
  double noise_std = 0.05;
  std::uint64_t encoder_seed = 0x5eedULL;
};

/// Visual features available at one step. Rows of each matrix are per-token features.
struct ObservationBundle {
  NodeId current;
  // Current and visited nodes (captured when each was the current node).
  std::map<NodeId, Eigen::MatrixXd> panoramas;
  // Candidates: one block per observing node, observation order, at most max_views.
  std::map<NodeId, std::vector<Eigen::MatrixXd>> candidate_views;
  int max_views = 3;

  const Eigen::MatrixXd& panorama() const { return panoramas.at(current); }
  bool has(NodeId id) const { return panoramas.count(id) || candidate_views.count(id); }
  /// Token features of a node as they enter the prompt: its panorama, or its views stacked in order.
  Eigen::MatrixXd node_tokens(NodeId id) const;
  /// Fixed-size candidate representation: views concatenated and zero-padded to max_views.
  Eigen::MatrixXd stitched(NodeId id) const;
};

/// Stand-in for a frozen image encoder: fixed seeded embedding tables for
/// landmarks, bearings and token slots, plus per-observation seeded noise.
class ObservationModel {
 public:
  explicit ObservationModel(const ObservationConfig& config = {});

  const ObservationConfig& config() const { return config_; }
  Eigen::MatrixXd panorama(const World& world, int vertex) const;
  Eigen::MatrixXd view(const World& world, int candidate, int observer) const;
  ObservationBundle observe(const World& world, const TopoGraph& graph) const;

 private:
  ObservationConfig config_;
  Eigen::MatrixXd landmark_table_;
  Eigen::MatrixXd bearing_table_;
  Eigen::MatrixXd panorama_slots_;
  Eigen::MatrixXd view_slots_;
};

/// Moves the map to world `vertex`, reporting every world neighbour. Unseen
/// vertices get fresh ids in ascending vertex order. Returns the map id of `vertex`.
NodeId advance_map(const World& world, TopoGraph& graph, int vertex);

struct ActionLabel {
  std::optional<NodeId> target;  // nullopt = stop
  bool is_stop() const { return !target.has_value(); }
};

struct SapSample {
  int episode_id = 0;
  int step = 0;
  TopoGraph graph;
  ObservationBundle observations;
  ActionLabel gt_action;
};

/// Teacher-forced samples along gt_path: one per move plus a final stop.
std::vector<SapSample> make_sap_samples(const Episode& episode, const ObservationModel& observer);

}  // namespace starnav
