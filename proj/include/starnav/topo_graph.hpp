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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace starnav {

/// Map-local node identifier. Ids are dense, start at 1 and follow first-observation order.
struct NodeId {
  int value = 0;
  constexpr auto operator<=>(const NodeId&) const = default;
  constexpr int index() const { return value - 1; }
  static constexpr NodeId from_index(int i) { return NodeId{i + 1}; }
};

enum class NodeStatus : std::uint8_t { Current, Visited, Candidate };

const char* to_string(NodeStatus status);

/// Where an observed node lives in the world. The map keeps it so observations
/// can be regenerated and so dumps can show positions.
struct ObservationRef {
  int vertex = -1;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

struct Neighbor {
  NodeId id;
  double length = 0.0;
  ObservationRef observation;
};

struct MapNode {
  NodeId id;
  NodeStatus status = NodeStatus::Candidate;
  ObservationRef observation;
  // Visited nodes this node was observed from, in observation order.
  std::vector<NodeId> observers;
  int first_seen_step = 0;
};

struct MapEdge {
  NodeId a;  // a < b
  NodeId b;
  double length = 0.0;
};

/// Node-indexed geodesic distances; entry (i, j) belongs to NodeIds i+1 and j+1.
using DistanceMatrix = Eigen::MatrixXd;

/// The agent's online topological map. Nodes and edges only ever accumulate.
class TopoGraph {
 public:
  bool empty() const { return nodes_.empty(); }
  int size() const { return static_cast<int>(nodes_.size()); }
  int step() const { return step_; }
  NodeId next_id() const { return NodeId::from_index(size()); }

  bool contains(NodeId id) const { return id.value >= 1 && id.value <= size(); }
  const MapNode& node(NodeId id) const;
  std::span<const MapNode> nodes() const { return nodes_; }

  /// Throws InvalidNode when the graph is empty.
  NodeId current() const;

  std::vector<NodeId> candidates() const;
  std::vector<NodeId> visited() const;

  std::optional<double> edge_length(NodeId a, NodeId b) const;
  std::vector<std::pair<NodeId, double>> adjacent(NodeId id) const;
  std::vector<MapEdge> edges() const;
  int edge_count() const { return static_cast<int>(edges_.size()); }

  std::optional<NodeId> find_vertex(int vertex) const;

  /// One navigation step: `new_current` becomes Current, the previous Current
  /// becomes Visited, unseen neighbors join as Candidates and every candidate
  /// neighbor records `new_current` as an observer. Unseen ids must be handed
  /// out densely via next_id(). `self` is only consulted when `new_current`
  /// is new to the map (episode start).
  void observe_and_move(NodeId new_current, std::span<const Neighbor> neighbors,
                        const ObservationRef& self = {});

  /// Rebuilds a map from stored parts, checking the same invariants the
  /// incremental update maintains. Throws InconsistentState on violation.
  static TopoGraph restore(std::vector<MapNode> nodes, std::span<const MapEdge> edges, int step);

 private:
  void add_edge(NodeId a, NodeId b, double length);

  std::vector<MapNode> nodes_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;  // by index
  std::map<std::pair<int, int>, double> edges_;
  std::optional<NodeId> current_;
  int step_ = 0;
};

/// Value-returning form of TopoGraph::observe_and_move.
TopoGraph observe_and_move(TopoGraph graph, NodeId new_current, std::span<const Neighbor> neighbors,
                           const ObservationRef& self = {});

/// All-pairs geodesic distances over the currently known edges.
DistanceMatrix pairwise_distances(const TopoGraph& graph);

/// Shortest node sequence from `from` to `to`; among equal-length paths the
/// lexicographically smallest id sequence wins.
std::vector<NodeId> shortest_path(const TopoGraph& graph, NodeId from, NodeId to);

/// Sum of edge lengths along `path`; throws InvalidMove if two consecutive
/// nodes are not joined by a known edge.
double path_length(const TopoGraph& graph, std::span<const NodeId> path);

}  // namespace starnav
