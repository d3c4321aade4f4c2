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

#include "starnav/graph_algo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace starnav::graph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

Eigen::VectorXd single_source_distances(const Adjacency& adjacency, int source) {
  const int n = static_cast<int>(adjacency.size());
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, kInf);
  std::vector<bool> done(n, false);
  dist(source) = 0.0;
  for (int round = 0; round < n; ++round) {
    int u = -1;
    for (int v = 0; v < n; ++v) {
      if (!done[v] && (u < 0 || dist(v) < dist(u))) u = v;
    }
    if (u < 0 || dist(u) == kInf) break;
    done[u] = true;
    for (const auto& [v, w] : adjacency[u]) {
      if (dist(u) + w < dist(v)) dist(v) = dist(u) + w;
    }
  }
  return dist;
}

Eigen::MatrixXd all_pairs_distances(const Adjacency& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd row = single_source_distances(adjacency, i);
    for (int j = i; j < n; ++j) {
      d(i, j) = row(j);
      d(j, i) = row(j);
    }
    d(i, i) = 0.0;
  }
  return d;
}

std::vector<int> lex_shortest_path(const Adjacency& adjacency, int from, int to) {
  const Eigen::VectorXd to_target = single_source_distances(adjacency, to);
  if (to_target(from) == kInf) return {};
  std::vector<int> path{from};
  int u = from;
  while (u != to) {
    int best = -1;
    for (const auto& [v, w] : adjacency[u]) {
      if (to_target(v) == kInf) continue;
      if (nearly_equal(w + to_target(v), to_target(u)) && (best < 0 || v < best)) best = v;
    }
    // A tight neighbour always exists on a shortest-path tree.
    if (best < 0) return {};
    path.push_back(best);
    u = best;
  }
  return path;
}

bool is_connected(const Adjacency& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& [v, w] : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

}  // namespace starnav::graph
