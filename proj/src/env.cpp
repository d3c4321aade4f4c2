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

#include "starnav/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "starnav/error.hpp"
#include "starnav/random.hpp"
#include "starnav/vocab.hpp"

namespace starnav {

std::optional<double> World::edge_length(int a, int b) const {
  if (a < 0 || a >= size()) return std::nullopt;
  for (const auto& [v, w] : adjacency[a]) {
    if (v == b) return w;
  }
  return std::nullopt;
}

double World::average_degree() const {
  if (positions.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& row : adjacency) total += row.size();
  return static_cast<double>(total) / static_cast<double>(size());
}

void World::finalize() { geodesic = graph::all_pairs_distances(adjacency); }

namespace {

// Longest edge of the Euclidean minimum spanning tree: the smallest radius at
// which a disk graph over `pts` is connected.
double connectivity_radius(const std::vector<Eigen::Vector2d>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<bool> in_tree(n, false);
  best[0] = 0.0;
  double longest = 0.0;
  for (int round = 0; round < n; ++round) {
    int u = -1;
    for (int v = 0; v < n; ++v) {
      if (!in_tree[v] && (u < 0 || best[v] < best[u])) u = v;
    }
    in_tree[u] = true;
    longest = std::max(longest, best[u]);
    for (int v = 0; v < n; ++v) {
      if (!in_tree[v]) best[v] = std::min(best[v], (pts[u] - pts[v]).norm());
    }
  }
  return longest;
}

}  // namespace

World generate_world(std::uint64_t seed, const WorldConfig& config) {
  if (config.num_nodes < 8 || config.num_nodes > 40) {
    throw Error(ErrorCode::ConfigError, "world node count must be in [8, 40], got " + std::to_string(config.num_nodes));
  }
  if (config.num_landmarks < 1 || config.num_landmarks > vocab::kMaxLandmarks) {
    throw Error(ErrorCode::ConfigError, "landmark count must be in [1, 64]");
  }
  if (!(config.box_size > 0.0) || config.min_separation < 0.0) {
    throw Error(ErrorCode::ConfigError, "world box must be positive");
  }

  Rng rng(mix_seed({seed, 0x776f726cULL}));
  const int n = config.num_nodes;
  const double area = config.box_size * config.box_size;
  const double target_radius = std::sqrt(config.target_degree * area / (std::numbers::pi * (n - 1)));

  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    std::vector<Eigen::Vector2d> pts;
    int tries = 0;
    while (static_cast<int>(pts.size()) < n && tries < 1000 * n) {
      ++tries;
      const Eigen::Vector2d p(rng.uniform(0.0, config.box_size), rng.uniform(0.0, config.box_size));
      const bool clear = std::all_of(pts.begin(), pts.end(), [&](const Eigen::Vector2d& q) {
        return (p - q).norm() >= config.min_separation;
      });
      if (clear) pts.push_back(p);
    }
    if (static_cast<int>(pts.size()) < n) continue;

    const double radius = std::max(target_radius, connectivity_radius(pts));
    World world;
    world.seed = seed;
    world.positions = pts;
    world.adjacency.assign(n, {});
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double d = (pts[i] - pts[j]).norm();
        if (d <= radius) {
          world.adjacency[i].emplace_back(j, d);
          world.adjacency[j].emplace_back(i, d);
        }
      }
    }
    const double degree = world.average_degree();
    if (degree < 2.0 || degree > 5.0 || !graph::is_connected(world.adjacency)) continue;

    world.landmarks.resize(n);
    for (int i = 0; i < n; ++i) world.landmarks[i] = rng.below(config.num_landmarks);
    world.finalize();
    return world;
  }
  throw Error(ErrorCode::GenerationFailure, "no connected world within " + std::to_string(config.max_attempts) + " attempts");
}

World make_world(std::vector<Eigen::Vector2d> positions, const std::vector<std::pair<int, int>>& edges,
                 std::vector<int> landmarks, std::uint64_t seed) {
  World world;
  world.seed = seed;
  const int n = static_cast<int>(positions.size());
  if (static_cast<int>(landmarks.size()) != n) throw Error(ErrorCode::ConfigError, "one landmark per vertex required");
  world.positions = std::move(positions);
  world.landmarks = std::move(landmarks);
  world.adjacency.assign(n, {});
  for (const auto& [a, b] : edges) {
    if (a == b || a < 0 || b < 0 || a >= n || b >= n) throw Error(ErrorCode::ConfigError, "bad world edge");
    const double d = (world.positions[a] - world.positions[b]).norm();
    world.adjacency[a].emplace_back(b, d);
    world.adjacency[b].emplace_back(a, d);
  }
  if (!graph::is_connected(world.adjacency)) throw Error(ErrorCode::GenerationFailure, "scripted world is disconnected");
  world.finalize();
  return world;
}

std::vector<int> make_instruction(const World& world, const std::vector<int>& path) {
  std::vector<int> tokens;
  for (std::size_t k = 1; k + 1 < path.size(); ++k) {
    tokens.push_back(k == 1 ? vocab::kGo : vocab::kThen);
    tokens.push_back(vocab::landmark(world.landmarks[path[k]]));
  }
  if (!path.empty()) {
    tokens.push_back(vocab::kStopAt);
    tokens.push_back(vocab::landmark(world.landmarks[path.back()]));
  }
  return tokens;
}

Episode generate_episode(std::shared_ptr<const World> world, std::uint64_t seed, const EpisodeConfig& config) {
  if (!world || world->size() < 2) throw Error(ErrorCode::ConfigError, "episode needs a valid world");
  Rng rng(mix_seed({seed, world->seed, 0x65706973ULL}));
  const int n = world->size();
  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    const int start = rng.below(n);
    const int goal = rng.below(n);
    if (start == goal) continue;
    auto path = graph::lex_shortest_path(world->adjacency, start, goal);
    const int len = static_cast<int>(path.size());
    if (len < config.min_path_nodes || len > config.max_path_nodes) continue;
    Episode ep;
    ep.world = world;
    ep.start = start;
    ep.goal = goal;
    ep.gt_path = std::move(path);
    ep.instruction = make_instruction(*world, ep.gt_path);
    ep.seed = seed;
    return ep;
  }
  throw Error(ErrorCode::GenerationFailure, "no start/goal pair with a path of the required length");
}

int bearing_bin(const Eigen::Vector2d& from, const Eigen::Vector2d& to, int bins) {
  const Eigen::Vector2d d = to - from;
  double deg = std::atan2(d.y(), d.x()) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  const int bin = static_cast<int>(std::floor(deg / (360.0 / bins)));
  return std::clamp(bin, 0, bins - 1);
}

Eigen::MatrixXd ObservationBundle::node_tokens(NodeId id) const {
  if (auto it = panoramas.find(id); it != panoramas.end()) return it->second;
  auto it = candidate_views.find(id);
  if (it == candidate_views.end() || it->second.empty()) {
    throw Error(ErrorCode::IncompletePrompt, "no observation for node " + std::to_string(id.value));
  }
  Eigen::Index rows = 0;
  for (const auto& v : it->second) rows += v.rows();
  Eigen::MatrixXd out(rows, it->second.front().cols());
  Eigen::Index r = 0;
  for (const auto& v : it->second) {
    out.middleRows(r, v.rows()) = v;
    r += v.rows();
  }
  return out;
}

Eigen::MatrixXd ObservationBundle::stitched(NodeId id) const {
  const auto& views = candidate_views.at(id);
  const Eigen::Index per_view = views.front().rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(per_view * max_views, views.front().cols());
  for (int k = 0; k < std::min<int>(max_views, static_cast<int>(views.size())); ++k) {
    out.middleRows(k * per_view, per_view) = views[k];
  }
  return out;
}

ObservationModel::ObservationModel(const ObservationConfig& config) : config_(config) {
  if (config.d_obs < 1 || config.panorama_tokens < 1 || config.view_tokens < 1 || config.max_views < 1 ||
      config.bearing_bins < 1 || config.noise_std < 0.0) {
    throw Error(ErrorCode::ConfigError, "invalid observation config");
  }
  Rng rng(mix_seed({config.encoder_seed, 0x656e63ULL}));
  auto table = [&](int rows, double scale) {
    Eigen::MatrixXd m(rows, config.d_obs);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
    return m;
  };
  landmark_table_ = table(vocab::kMaxLandmarks, 1.0);
  bearing_table_ = table(config.bearing_bins, 1.0);
  panorama_slots_ = table(config.panorama_tokens, 0.5);
  view_slots_ = table(config.view_tokens, 0.5);
}

namespace {

void add_noise(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, double std, std::uint64_t seed) {
  if (std == 0.0) return;
  Rng rng(seed);
  for (Eigen::Index i = 0; i < row.size(); ++i) row(i) += std * rng.normal();
}

}  // namespace

Eigen::MatrixXd ObservationModel::panorama(const World& world, int vertex) const {
  Eigen::MatrixXd out(config_.panorama_tokens, config_.d_obs);
  const auto lm = landmark_table_.row(world.landmarks.at(vertex));
  for (int s = 0; s < config_.panorama_tokens; ++s) {
    out.row(s) = lm + panorama_slots_.row(s);
    add_noise(out.row(s), config_.noise_std, mix_seed({world.seed, 1, static_cast<std::uint64_t>(vertex), static_cast<std::uint64_t>(s)}));
  }
  return out;
}

Eigen::MatrixXd ObservationModel::view(const World& world, int candidate, int observer) const {
  Eigen::MatrixXd out(config_.view_tokens, config_.d_obs);
  const int bin = bearing_bin(world.positions.at(observer), world.positions.at(candidate), config_.bearing_bins);
  for (int j = 0; j < config_.view_tokens; ++j) {
    // Even slots carry the landmark, odd slots the bearing from the observer.
    out.row(j) = (j % 2 == 0 ? landmark_table_.row(world.landmarks.at(candidate)) : bearing_table_.row(bin)) +
                 view_slots_.row(j);
    add_noise(out.row(j), config_.noise_std,
              mix_seed({world.seed, 2, static_cast<std::uint64_t>(candidate), static_cast<std::uint64_t>(observer),
                        static_cast<std::uint64_t>(j)}));
  }
  return out;
}

ObservationBundle ObservationModel::observe(const World& world, const TopoGraph& graph) const {
  ObservationBundle bundle;
  bundle.current = graph.current();
  bundle.max_views = config_.max_views;
  for (const auto& node : graph.nodes()) {
    if (node.status == NodeStatus::Candidate) {
      auto& views = bundle.candidate_views[node.id];
      const int count = std::min<int>(config_.max_views, static_cast<int>(node.observers.size()));
      for (int k = 0; k < count; ++k) {
        views.push_back(view(world, node.observation.vertex, graph.node(node.observers[k]).observation.vertex));
      }
    } else {
      bundle.panoramas[node.id] = panorama(world, node.observation.vertex);
    }
  }
  return bundle;
}

NodeId advance_map(const World& world, TopoGraph& graph, int vertex) {
  if (vertex < 0 || vertex >= world.size()) throw Error(ErrorCode::InvalidMove, "vertex outside world");
  NodeId id;
  int fresh = graph.size();
  if (graph.empty()) {
    id = NodeId{1};
    fresh = 1;
  } else {
    auto found = graph.find_vertex(vertex);
    if (!found) throw Error(ErrorCode::InvalidMove, "vertex " + std::to_string(vertex) + " has not been observed");
    id = *found;
  }
  auto world_neighbors = world.adjacency[vertex];
  std::sort(world_neighbors.begin(), world_neighbors.end());
  std::vector<Neighbor> neighbors;
  neighbors.reserve(world_neighbors.size());
  for (const auto& [v, w] : world_neighbors) {
    NodeId nid;
    if (auto known = graph.find_vertex(v)) {
      nid = *known;
    } else {
      nid = NodeId::from_index(fresh++);
    }
    neighbors.push_back(Neighbor{nid, w, ObservationRef{v, world.positions[v]}});
  }
  graph.observe_and_move(id, neighbors, ObservationRef{vertex, world.positions[vertex]});
  return id;
}

std::vector<SapSample> make_sap_samples(const Episode& episode, const ObservationModel& observer) {
  const World& world = *episode.world;
  std::vector<SapSample> samples;
  TopoGraph graph;
  for (std::size_t k = 0; k < episode.gt_path.size(); ++k) {
    advance_map(world, graph, episode.gt_path[k]);
    SapSample s;
    s.episode_id = episode.id;
    s.step = static_cast<int>(k);
    s.graph = graph;
    s.observations = observer.observe(world, graph);
    if (k + 1 < episode.gt_path.size()) {
      auto next = graph.find_vertex(episode.gt_path[k + 1]);
      if (!next || graph.node(*next).status != NodeStatus::Candidate) {
        throw Error(ErrorCode::InconsistentState, "next ground-truth node is not a candidate");
      }
      s.gt_action.target = next;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace starnav
