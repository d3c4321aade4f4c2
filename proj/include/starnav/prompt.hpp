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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "starnav/action_space.hpp"
#include "starnav/env.hpp"
#include "starnav/topo_graph.hpp"

namespace starnav {

/// Provenance of one prompt position: text, or a visual token of a map node.
struct TokenSource {
  std::optional<NodeId> node;

  bool is_visual() const { return node.has_value(); }
  static TokenSource text() { return {}; }
  static TokenSource visual(NodeId id) { return {id}; }
  bool operator==(const TokenSource&) const = default;
};

enum class PromptLayout {
  Interleaved,  // per-node header immediately followed by that node's visual tokens
  Flat,         // same tokens, every visual block moved after all text
};

struct PromptSegment {
  enum class Kind { Text, Visual };
  Kind kind = Kind::Text;
  int begin = 0;  // [begin, end) positions
  int end = 0;
  std::optional<NodeId> node;
  std::string label;
};

struct PromptSequence {
  std::vector<int> tokens;  // vocabulary ids; visual slots hold vocab::kImage
  std::vector<TokenSource> sources;
  Eigen::MatrixXd visual_features;  // one row per visual position, in position order
  std::vector<int> visual_row;      // position -> row of visual_features, -1 for text
  std::vector<PromptSegment> segments;
  std::vector<NodeId> node_order;

  int length() const { return static_cast<int>(tokens.size()); }
  /// Logits are read here.
  int decision_position() const { return length() - 1; }
  int visual_count() const { return static_cast<int>(visual_features.rows()); }
};

std::vector<int> default_system_prompt();

PromptSequence build_inp(const std::vector<int>& system_prompt, const std::vector<int>& instruction,
                         const TopoGraph& graph, const ObservationBundle& observations,
                         const ActionSpace& action_space, PromptLayout layout = PromptLayout::Interleaved);

/// 1 at visual positions, 0 at text positions.
Eigen::VectorXi token_mask(const PromptSequence& prompt);

/// Token-level affinity: D(i, j) between visual tokens of distinct nodes i, j; 0 elsewhere.
Eigen::MatrixXd expand_affinity(const DistanceMatrix& distances, const PromptSequence& prompt);

/// One line per segment with source annotations.
std::string render_prompt(const PromptSequence& prompt);

}  // namespace starnav
