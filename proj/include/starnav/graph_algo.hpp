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
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace starnav::graph {

/// Index-based weighted adjacency list for an undirected graph.
using Adjacency = std::vector<std::vector<std::pair<int, double>>>;

/// Dense-array Dijkstra; unreachable vertices stay at +infinity.
Eigen::VectorXd single_source_distances(const Adjacency& adjacency, int source);

/// All-pairs distances. Row i is computed from source i and mirrored into the
/// lower triangle, so the result is exactly symmetric.
Eigen::MatrixXd all_pairs_distances(const Adjacency& adjacency);

/// Lexicographically smallest shortest path from `from` to `to`, or an empty
/// vector when `to` is unreachable.
std::vector<int> lex_shortest_path(const Adjacency& adjacency, int from, int to);

bool is_connected(const Adjacency& adjacency);

}  // namespace starnav::graph
