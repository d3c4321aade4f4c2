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
#include <vector>

#include "starnav/env.hpp"
#include "starnav/topo_graph.hpp"

namespace starnav {

enum class ActionScope { Global, Local };

struct ActionEntry {
  std::optional<NodeId> node;  // nullopt = Stop
  int token = 0;
};

/// Index 0 is Stop; indices 1..N are candidate nodes in ascending id order.
struct ActionSpace {
  std::vector<ActionEntry> entries;

  int size() const { return static_cast<int>(entries.size()); }
  int candidate_count() const { return size() - 1; }
  std::optional<int> index_of(NodeId node) const;
  std::optional<int> index_of(const ActionLabel& label) const;
  bool contains(NodeId node) const { return index_of(node).has_value(); }
};

/// Global scope lists every candidate on the map; Local keeps only candidates
/// adjacent to the current node.
ActionSpace build_action_space(const TopoGraph& graph, ActionScope scope = ActionScope::Global);

}  // namespace starnav
