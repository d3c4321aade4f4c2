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

#include "starnav/prompt.hpp"

#include <sstream>

#include "starnav/error.hpp"
#include "starnav/vocab.hpp"

namespace starnav {

std::vector<int> default_system_prompt() {
  return {vocab::kSysRole, vocab::kSysTask, vocab::kSysContext, vocab::kSysRules};
}

namespace {

void append_number(std::vector<int>& out, int value) {
  const std::string digits = std::to_string(value);
  for (char c : digits) out.push_back(vocab::digit(c - '0'));
}

int status_token(NodeStatus s) {
  switch (s) {
    case NodeStatus::Current: return vocab::kCurrent;
    case NodeStatus::Visited: return vocab::kVisited;
    case NodeStatus::Candidate: return vocab::kCandidate;
  }
  return vocab::kPad;
}

class PromptBuilder {
 public:
  explicit PromptBuilder(int d_obs) : d_obs_(d_obs) {}

  void text(const std::vector<int>& tokens, std::string label, std::optional<NodeId> node = std::nullopt) {
    if (tokens.empty()) return;
    const int begin = p_.length();
    for (int t : tokens) {
      p_.tokens.push_back(t);
      p_.sources.push_back(TokenSource::text());
      p_.visual_row.push_back(-1);
    }
    p_.segments.push_back({PromptSegment::Kind::Text, begin, p_.length(), node, std::move(label)});
  }

  void visual(NodeId node, const Eigen::MatrixXd& features) {
    if (features.cols() != d_obs_) throw Error(ErrorCode::ShapeError, "visual feature width mismatch");
    const int begin = p_.length();
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
      p_.tokens.push_back(vocab::kImage);
      p_.sources.push_back(TokenSource::visual(node));
      p_.visual_row.push_back(static_cast<int>(rows_.size()));
      rows_.push_back(features.row(r));
    }
    p_.segments.push_back({PromptSegment::Kind::Visual, begin, p_.length(), node, "node " + std::to_string(node.value)});
  }

  PromptSequence finish() {
    p_.visual_features.resize(static_cast<Eigen::Index>(rows_.size()), d_obs_);
    for (std::size_t i = 0; i < rows_.size(); ++i) p_.visual_features.row(static_cast<Eigen::Index>(i)) = rows_[i];
    return std::move(p_);
  }

 private:
  int d_obs_;
  PromptSequence p_;
  std::vector<Eigen::RowVectorXd> rows_;
};

}  // namespace

PromptSequence build_inp(const std::vector<int>& system_prompt, const std::vector<int>& instruction,
                         const TopoGraph& graph, const ObservationBundle& observations,
                         const ActionSpace& action_space, PromptLayout layout) {
  if (instruction.empty()) throw Error(ErrorCode::IncompletePrompt, "instruction is empty");
  if (graph.empty()) throw Error(ErrorCode::IncompletePrompt, "map is empty");
  for (const auto& e : action_space.entries) {
    if (e.node && (!graph.contains(*e.node) || graph.node(*e.node).status != NodeStatus::Candidate)) {
      throw Error(ErrorCode::InconsistentState, "action space names a node that is not a map candidate");
    }
  }

  std::vector<std::pair<NodeId, Eigen::MatrixXd>> blocks;
  blocks.reserve(graph.size());
  for (const auto& node : graph.nodes()) {
    if (!observations.has(node.id)) {
      throw Error(ErrorCode::IncompletePrompt, "no observation for node " + std::to_string(node.id.value));
    }
    blocks.emplace_back(node.id, observations.node_tokens(node.id));
  }
  const int d_obs = static_cast<int>(blocks.front().second.cols());

  auto header = [&](const MapNode& node) {
    std::vector<int> h{vocab::kNode};
    append_number(h, node.id.value);
    h.push_back(status_token(node.status));
    if (auto idx = action_space.index_of(node.id)) {
      h.push_back(vocab::kAction);
      h.push_back(vocab::action(*idx));
    }
    return h;
  };
  std::vector<int> closing{vocab::kActions};
  for (const auto& e : action_space.entries) closing.push_back(e.token);
  closing.push_back(vocab::kDecide);

  std::vector<int> instr{vocab::kInstr};
  instr.insert(instr.end(), instruction.begin(), instruction.end());

  PromptBuilder b(d_obs);
  b.text(system_prompt, "system");
  b.text(instr, "instruction");
  if (layout == PromptLayout::Interleaved) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto& node = graph.nodes()[i];
      b.text(header(node), "header", node.id);
      b.visual(blocks[i].first, blocks[i].second);
    }
    b.text(closing, "actions");
  } else {
    for (const auto& node : graph.nodes()) b.text(header(node), "header", node.id);
    b.text(closing, "actions");
    for (const auto& [id, feats] : blocks) b.visual(id, feats);
  }
  PromptSequence prompt = b.finish();
  for (const auto& node : graph.nodes()) prompt.node_order.push_back(node.id);
  return prompt;
}

Eigen::VectorXi token_mask(const PromptSequence& prompt) {
  Eigen::VectorXi mask(prompt.length());
  for (int p = 0; p < prompt.length(); ++p) mask(p) = prompt.sources[p].is_visual() ? 1 : 0;
  return mask;
}

Eigen::MatrixXd expand_affinity(const DistanceMatrix& distances, const PromptSequence& prompt) {
  if (distances.rows() != distances.cols()) throw Error(ErrorCode::ShapeError, "distance matrix must be square");
  const int L = prompt.length();
  std::vector<int> owner(L, -1);
  for (int p = 0; p < L; ++p) {
    if (const auto& node = prompt.sources[p].node) {
      if (node->index() < 0 || node->index() >= distances.rows()) {
        throw Error(ErrorCode::InconsistentState,
                    "visual token refers to node " + std::to_string(node->value) + " outside the distance matrix");
      }
      owner[p] = node->index();
    }
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(L, L);
  for (int p = 0; p < L; ++p) {
    if (owner[p] < 0) continue;
    for (int q = 0; q < L; ++q) {
      if (owner[q] >= 0 && owner[q] != owner[p]) out(p, q) = distances(owner[p], owner[q]);
    }
  }
  return out;
}

std::string render_prompt(const PromptSequence& prompt) {
  std::ostringstream os;
  for (const auto& seg : prompt.segments) {
    if (seg.kind == PromptSegment::Kind::Visual) {
      os << "[visual node=" << seg.node->value << " pos=" << seg.begin << ".." << seg.end - 1 << "] "
         << (seg.end - seg.begin) << " tokens\n";
    } else {
      os << "[text " << seg.label;
      if (seg.node) os << " node=" << seg.node->value;
      os << " pos=" << seg.begin << ".." << seg.end - 1 << "]";
      for (int p = seg.begin; p < seg.end; ++p) os << ' ' << vocab::token_name(prompt.tokens[p]);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace starnav
