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

#include <memory>
#include <vector>

#include "starnav/dataset.hpp"
#include "starnav/env.hpp"
#include "starnav/prompt.hpp"
#include "starnav/random.hpp"
#include "starnav/vocab.hpp"

namespace starnav::fixtures {

/// Start vertex 0 with four spokes (vertices 1..4), vertex 5 beyond 1 and
/// vertex 6 beyond 4. Map ids from the start: 0 -> 1, spokes 1..4 -> 2..5.
/// Ground truth runs 0 -> 4 -> 6.
inline std::shared_ptr<const World> spoke_world() {
  std::vector<Eigen::Vector2d> pos = {{0, 0}, {3, 0}, {0, 3}, {-3, 0}, {0, -3}, {6, 0}, {0, -6}};
  const std::vector<std::pair<int, int>> edges = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 5}, {4, 6}};
  return std::make_shared<const World>(make_world(std::move(pos), edges, {0, 1, 2, 3, 4, 5, 6}, 11));
}

inline Episode episode_on(std::shared_ptr<const World> world, std::vector<int> gt_path, int id = 0) {
  Episode ep;
  ep.id = id;
  ep.world = world;
  ep.start = gt_path.front();
  ep.goal = gt_path.back();
  ep.instruction = make_instruction(*world, gt_path);
  ep.gt_path = std::move(gt_path);
  ep.seed = 5;
  return ep;
}

inline Episode spoke_episode() { return episode_on(spoke_world(), {0, 4, 6}); }

inline DatasetConfig small_dataset_config() {
  DatasetConfig c;
  c.train_worlds = 6;
  c.train_episodes_per_world = 3;
  c.val_worlds = 4;
  c.val_episodes_per_world = 3;
  return c;
}

inline const Dataset& small_dataset() {
  static const Dataset ds = generate_dataset(3, small_dataset_config());
  return ds;
}

/// A short prompt mixing text and three nodes' visual blocks, ending at the decision cue.
struct MixedInput {
  PromptSequence prompt;
  Eigen::MatrixXd d_hat;
  int gt_token = 0;
};

inline MixedInput mixed_prompt(Rng& rng, int d_obs, int nodes = 3, int visual_per_node = 3) {
  MixedInput in;
  auto& p = in.prompt;
  std::vector<Eigen::RowVectorXd> rows;
  auto text = [&](int token) {
    p.tokens.push_back(token);
    p.sources.push_back(TokenSource::text());
    p.visual_row.push_back(-1);
  };
  text(vocab::kSysRole);
  text(vocab::kInstr);
  text(vocab::landmark(static_cast<int>(rng.below(24))));
  for (int n = 1; n <= nodes; ++n) {
    text(vocab::kNode);
    text(n == 1 ? vocab::kCurrent : vocab::action(n - 1));
    for (int k = 0; k < visual_per_node; ++k) {
      p.tokens.push_back(vocab::kImage);
      p.sources.push_back(TokenSource::visual(NodeId{n}));
      p.visual_row.push_back(static_cast<int>(rows.size()));
      Eigen::RowVectorXd r(d_obs);
      for (int c = 0; c < d_obs; ++c) r(c) = rng.normal();
      rows.push_back(r);
    }
    p.node_order.push_back(NodeId{n});
  }
  text(vocab::kActions);
  text(vocab::kDecide);
  p.visual_features.resize(static_cast<Eigen::Index>(rows.size()), d_obs);
  for (std::size_t i = 0; i < rows.size(); ++i) p.visual_features.row(static_cast<Eigen::Index>(i)) = rows[i];

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 1; j < nodes; ++j) d(i, j) = d(j, i) = 0.5 + 4.5 * rng.uniform();
  }
  in.d_hat = expand_affinity(d, p);
  in.gt_token = vocab::action(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(nodes - 1))));
  return in;
}

}  // namespace starnav::fixtures
