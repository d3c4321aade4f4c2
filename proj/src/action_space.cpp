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

#include "starnav/action_space.hpp"

#include "starnav/error.hpp"
#include "starnav/vocab.hpp"

namespace starnav {

std::optional<int> ActionSpace::index_of(NodeId node) const {
  for (int i = 1; i < size(); ++i) {
    if (entries[i].node == node) return i;
  }
  return std::nullopt;
}

std::optional<int> ActionSpace::index_of(const ActionLabel& label) const {
  if (label.is_stop()) return 0;
  return index_of(*label.target);
}

ActionSpace build_action_space(const TopoGraph& graph, ActionScope scope) {
  ActionSpace space;
  space.entries.push_back({std::nullopt, vocab::kStop});
  if (graph.empty()) return space;
  const NodeId here = graph.current();
  for (NodeId c : graph.candidates()) {
    if (scope == ActionScope::Local && !graph.edge_length(here, c)) continue;
    const int index = space.size();
    if (index > vocab::kMaxActions) throw Error(ErrorCode::InconsistentState, "action space exceeds the action vocabulary");
    space.entries.push_back({c, vocab::action(index)});
  }
  return space;
}

}  // namespace starnav
