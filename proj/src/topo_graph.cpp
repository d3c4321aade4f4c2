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

#include "starnav/topo_graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "starnav/error.hpp"
#include "starnav/graph_algo.hpp"

namespace starnav {

const char* to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::Current: return "current";
    case NodeStatus::Visited: return "visited";
    case NodeStatus::Candidate: return "candidate";
  }
  return "?";
}

const MapNode& TopoGraph::node(NodeId id) const {
  if (!contains(id)) throw Error(ErrorCode::InvalidNode, "node " + std::to_string(id.value) + " not in map");
  return nodes_[id.index()];
}

NodeId TopoGraph::current() const {
  if (!current_) throw Error(ErrorCode::InvalidNode, "map is empty");
  return *current_;
}

std::vector<NodeId> TopoGraph::candidates() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.status == NodeStatus::Candidate) out.push_back(n.id);
  }
  return out;
}

std::vector<NodeId> TopoGraph::visited() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.status == NodeStatus::Visited) out.push_back(n.id);
  }
  return out;
}

std::optional<double> TopoGraph::edge_length(NodeId a, NodeId b) const {
  const auto key = std::minmax(a.value, b.value);
  if (auto it = edges_.find({key.first, key.second}); it != edges_.end()) return it->second;
  return std::nullopt;
}

std::vector<std::pair<NodeId, double>> TopoGraph::adjacent(NodeId id) const {
  node(id);
  std::vector<std::pair<NodeId, double>> out;
  for (const auto& [j, w] : adjacency_[id.index()]) out.emplace_back(NodeId::from_index(j), w);
  return out;
}

std::vector<MapEdge> TopoGraph::edges() const {
  std::vector<MapEdge> out;
  out.reserve(edges_.size());
  for (const auto& [key, w] : edges_) out.push_back({NodeId{key.first}, NodeId{key.second}, w});
  return out;
}

std::optional<NodeId> TopoGraph::find_vertex(int vertex) const {
  for (const auto& n : nodes_) {
    if (n.observation.vertex == vertex) return n.id;
  }
  return std::nullopt;
}

void TopoGraph::add_edge(NodeId a, NodeId b, double length) {
  const auto key = std::minmax(a.value, b.value);
  auto [it, inserted] = edges_.try_emplace({key.first, key.second}, length);
  if (!inserted) {
    // First report wins; a differing second report means the caller's world is inconsistent.
    if (std::abs(it->second - length) > 1e-9 * std::max(1.0, length)) {
      throw Error(ErrorCode::InconsistentState, "edge (" + std::to_string(key.first) + "," +
                                                    std::to_string(key.second) + ") re-reported with a different length");
    }
    return;
  }
  adjacency_[a.index()].emplace_back(b.index(), length);
  adjacency_[b.index()].emplace_back(a.index(), length);
}

void TopoGraph::observe_and_move(NodeId new_current, std::span<const Neighbor> neighbors,
                                 const ObservationRef& self) {
  if (empty()) {
    if (new_current != next_id()) {
      throw Error(ErrorCode::InvalidMove, "first node of an episode must be " + std::to_string(next_id().value));
    }
    nodes_.push_back(MapNode{new_current, NodeStatus::Current, self, {}, step_});
    adjacency_.emplace_back();
  } else {
    if (!contains(new_current)) {
      throw Error(ErrorCode::InvalidMove, "cannot move to unknown node " + std::to_string(new_current.value));
    }
    nodes_[current_->index()].status = NodeStatus::Visited;
    nodes_[new_current.index()].status = NodeStatus::Current;
  }
  current_ = new_current;

  for (const auto& nb : neighbors) {
    if (!(nb.length > 0.0) || !std::isfinite(nb.length)) {
      throw Error(ErrorCode::InvalidMove, "edge lengths must be positive and finite");
    }
    if (nb.id == new_current) throw Error(ErrorCode::InvalidNode, "self-edge reported");
    if (!contains(nb.id)) {
      if (nb.id != next_id()) {
        throw Error(ErrorCode::InvalidNode, "new node ids must be assigned densely; expected " +
                                                std::to_string(next_id().value) + ", got " +
                                                std::to_string(nb.id.value));
      }
      nodes_.push_back(MapNode{nb.id, NodeStatus::Candidate, nb.observation, {}, step_});
      adjacency_.emplace_back();
    } else if (nb.observation.vertex >= 0 && nodes_[nb.id.index()].observation.vertex >= 0 &&
               nb.observation.vertex != nodes_[nb.id.index()].observation.vertex) {
      throw Error(ErrorCode::InconsistentState, "node " + std::to_string(nb.id.value) + " re-observed as a different vertex");
    }
    add_edge(new_current, nb.id, nb.length);
    auto& target = nodes_[nb.id.index()];
    if (target.status == NodeStatus::Candidate &&
        std::find(target.observers.begin(), target.observers.end(), new_current) == target.observers.end()) {
      target.observers.push_back(new_current);
    }
  }
  ++step_;
}

TopoGraph TopoGraph::restore(std::vector<MapNode> nodes, std::span<const MapEdge> edges, int step) {
  TopoGraph g;
  g.step_ = step;
  int currents = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id != NodeId::from_index(static_cast<int>(i))) {
      throw Error(ErrorCode::InconsistentState, "stored node ids must be dense and ordered");
    }
    if (nodes[i].status == NodeStatus::Current) {
      ++currents;
      g.current_ = nodes[i].id;
    }
  }
  if (!nodes.empty() && currents != 1) throw Error(ErrorCode::InconsistentState, "exactly one current node required");
  g.nodes_ = std::move(nodes);
  g.adjacency_.assign(g.nodes_.size(), {});
  for (const auto& e : edges) {
    if (!g.contains(e.a) || !g.contains(e.b) || e.a == e.b || !(e.length > 0.0)) {
      throw Error(ErrorCode::InconsistentState, "stored edge is invalid");
    }
    g.add_edge(e.a, e.b, e.length);
  }
  for (const auto& n : g.nodes_) {
    for (NodeId o : n.observers) {
      if (!g.contains(o)) throw Error(ErrorCode::InconsistentState, "observer refers to an unknown node");
    }
  }
  if (!g.empty() && !graph::is_connected(g.adjacency_)) {
    throw Error(ErrorCode::ConnectivityViolation, "stored map is disconnected");
  }
  return g;
}

TopoGraph observe_and_move(TopoGraph graph, NodeId new_current, std::span<const Neighbor> neighbors,
                           const ObservationRef& self) {
  graph.observe_and_move(new_current, neighbors, self);
  return graph;
}

namespace {

graph::Adjacency index_adjacency(const TopoGraph& g) {
  graph::Adjacency adj(g.size());
  for (const auto& e : g.edges()) {
    adj[e.a.index()].emplace_back(e.b.index(), e.length);
    adj[e.b.index()].emplace_back(e.a.index(), e.length);
  }
  return adj;
}

}  // namespace

DistanceMatrix pairwise_distances(const TopoGraph& g) {
  if (g.empty()) throw Error(ErrorCode::InvalidNode, "pairwise distances of an empty map");
  DistanceMatrix d = graph::all_pairs_distances(index_adjacency(g));
  if (!d.allFinite()) throw Error(ErrorCode::ConnectivityViolation, "topological map is disconnected");
  return d;
}

std::vector<NodeId> shortest_path(const TopoGraph& g, NodeId from, NodeId to) {
  g.node(from);
  g.node(to);
  const auto idx = graph::lex_shortest_path(index_adjacency(g), from.index(), to.index());
  if (idx.empty()) throw Error(ErrorCode::ConnectivityViolation, "no path between map nodes");
  std::vector<NodeId> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(NodeId::from_index(i));
  return out;
}

double path_length(const TopoGraph& g, std::span<const NodeId> path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    auto w = g.edge_length(path[i - 1], path[i]);
    if (!w) throw Error(ErrorCode::InvalidMove, "consecutive path nodes are not adjacent");
    total += *w;
  }
  return total;
}

}  // namespace starnav
