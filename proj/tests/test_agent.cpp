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

#include <doctest.h>

#include "fixtures.hpp"
#include "starnav/action_space.hpp"
#include "starnav/agent.hpp"
#include "starnav/error.hpp"
#include "starnav/metrics.hpp"

using namespace starnav;

namespace {

// Seven nodes on a path 1-2-...-7 with the given statuses; node 1 is current.
TopoGraph status_chain(const std::vector<NodeStatus>& statuses) {
  std::vector<MapNode> nodes;
  std::vector<MapEdge> edges;
  for (std::size_t i = 0; i < statuses.size(); ++i) {
    MapNode n;
    n.id = NodeId::from_index(static_cast<int>(i));
    n.status = statuses[i];
    n.observation.vertex = static_cast<int>(i);
    if (n.status == NodeStatus::Candidate) n.observers.push_back(NodeId{1});
    nodes.push_back(n);
    if (i > 0) edges.push_back({NodeId::from_index(static_cast<int>(i) - 1), n.id, 1.0});
  }
  return TopoGraph::restore(std::move(nodes), edges, 1);
}

std::shared_ptr<const World> line_world(int n) {
  std::vector<Eigen::Vector2d> pos;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> landmarks;
  for (int i = 0; i < n; ++i) {
    pos.emplace_back(2.0 * i, 0.0);
    landmarks.push_back(i % 24);
    if (i > 0) edges.emplace_back(i - 1, i);
  }
  return std::make_shared<const World>(make_world(std::move(pos), edges, landmarks, 2));
}

ActionSpace three_way() {
  ActionSpace s;
  s.entries = {{std::nullopt, vocab::kStop}, {NodeId{2}, vocab::action(1)}, {NodeId{3}, vocab::action(2)}};
  return s;
}

Eigen::RowVectorXd logits_for(std::initializer_list<std::pair<int, double>> values) {
  Eigen::RowVectorXd l = Eigen::RowVectorXd::Constant(vocab::kDefaultSize, -5.0);
  for (const auto& [tok, v] : values) l(tok) = v;
  return l;
}

}  // namespace

TEST_CASE("action space") {
  using S = NodeStatus;
  SUBCASE("candidates in ascending order after Stop") {
    const auto g = status_chain({S::Current, S::Visited, S::Candidate, S::Visited, S::Candidate, S::Visited, S::Candidate});
    const auto space = build_action_space(g);
    REQUIRE(space.size() == 4);
    CHECK_FALSE(space.entries[0].node.has_value());
    CHECK(space.entries[0].token == vocab::kStop);
    CHECK(*space.entries[1].node == NodeId{3});
    CHECK(*space.entries[2].node == NodeId{5});
    CHECK(*space.entries[3].node == NodeId{7});
    CHECK(space.entries[3].token == vocab::action(3));
    CHECK(space.index_of(NodeId{5}) == 2);
    CHECK_FALSE(space.index_of(NodeId{4}).has_value());
  }
  SUBCASE("nothing left to explore") {
    const auto g = status_chain({S::Visited, S::Visited, S::Current});
    CHECK(build_action_space(g).size() == 1);
  }
  SUBCASE("local scope keeps only neighbors of the current node") {
    const auto g = status_chain({S::Current, S::Candidate, S::Visited, S::Candidate});
    const auto global = build_action_space(g, ActionScope::Global);
    const auto local = build_action_space(g, ActionScope::Local);
    CHECK(global.size() == 3);
    REQUIRE(local.size() == 2);
    CHECK(*local.entries[1].node == NodeId{2});
  }
}

TEST_CASE("greedy decoding") {
  const auto space = three_way();
  SUBCASE("stop wins") {
    CHECK(decide(logits_for({{vocab::kStop, 3.0}, {vocab::action(1), 1.0}}), space).is_stop());
  }
  SUBCASE("argmax over the legal actions") {
    const auto d = decide(logits_for({{vocab::kStop, -1.0}, {vocab::action(1), 2.0}, {vocab::action(2), 0.0}}), space);
    CHECK(*d.target == NodeId{2});
    CHECK(d.token == vocab::action(1));
    CHECK(d.action_logits == std::vector<double>{-1.0, 2.0, 0.0});
  }
  SUBCASE("ties go to the lower action index") {
    const auto d = decide(logits_for({{vocab::kStop, 0.0}, {vocab::action(1), 1.0}, {vocab::action(2), 1.0}}), space);
    CHECK(*d.target == NodeId{2});
  }
  SUBCASE("restricted decoding ignores illegal tokens") {
    const auto l = logits_for({{vocab::action(9), 10.0}, {vocab::action(2), 1.0}});
    CHECK(*decide(l, space).target == NodeId{3});
    const auto raw = decide(l, space, false);
    CHECK(raw.is_stop());
    CHECK(raw.out_of_space);
    CHECK(raw.token == vocab::action(9));
  }
}

TEST_CASE("execute moves along the map") {
  const auto world = fixtures::spoke_world();
  TopoGraph g;
  advance_map(*world, g, 0);
  SUBCASE("adjacent target is one hop") {
    const auto r = execute(g, *world, Decision::move(NodeId{2}, vocab::action(1)));
    CHECK(r.traversed == std::vector<NodeId>{NodeId{1}, NodeId{2}});
    CHECK(r.length == 3.0);
    CHECK(g.current() == NodeId{2});
  }
  SUBCASE("stop stays put") {
    const auto r = execute(g, *world, Decision::stop());
    CHECK(r.traversed == std::vector<NodeId>{NodeId{1}});
    CHECK(g.current() == NodeId{1});
  }
  SUBCASE("unknown target") {
    CHECK_THROWS_AS(execute(g, *world, Decision::move(NodeId{12}, vocab::action(1))), Error);
  }
}

TEST_CASE("backtracking to a candidate of an earlier node") {
  // Start at vertex 0 (node 1), step to vertex 1 (node 2), then pick vertex 4,
  // which node 1 saw as candidate node 5.
  const Episode ep = fixtures::episode_on(fixtures::spoke_world(), {0, 4, 6});
  ScriptedPolicy policy({1, 4, 6, -1});
  const auto traj = rollout(policy, ep, ObservationModel());
  REQUIRE(traj.steps.size() == 4);
  const auto& step = traj.steps[1];
  CHECK(*step.decision.target == NodeId{5});
  CHECK(step.traversed == std::vector<NodeId>{NodeId{2}, NodeId{1}, NodeId{5}});
  CHECK(step.traversed_length == 6.0);
  CHECK(step.geodesic_at_decision == 6.0);
  const auto& snap = traj.snapshots[step.snapshot];
  CHECK(snap.current() == NodeId{2});
  CHECK_FALSE(snap.edge_length(NodeId{2}, NodeId{5}).has_value());
  CHECK(traj.vertices == std::vector<int>{0, 1, 0, 4, 6});
  CHECK(traj.stopped);
  CHECK(traj.length == 12.0);
  const auto rec = score_episode(traj, ep);
  CHECK(rec.success);
  CHECK(rec.spl == doctest::Approx(0.5));
}

TEST_CASE("rollouts with stub policies") {
  const ObservationModel observer;
  SUBCASE("oracle replays the ground truth and stops at the goal") {
    for (const auto& ep : fixtures::small_dataset().val) {
      OraclePolicy oracle;
      const auto traj = rollout(oracle, ep, observer);
      CHECK(traj.vertices == ep.gt_path);
      CHECK(traj.stopped);
      CHECK(traj.steps.size() == ep.gt_path.size());
    }
  }
  SUBCASE("always stop") {
    AlwaysStopPolicy stop;
    const Episode ep = fixtures::spoke_episode();
    const auto traj = rollout(stop, ep, observer);
    CHECK(traj.vertices == std::vector<int>{0});
    CHECK(traj.length == 0.0);
    CHECK(traj.stopped);
    REQUIRE(traj.steps.size() == 1);
    CHECK(traj.steps[0].traversed == std::vector<NodeId>{NodeId{1}});
  }
  SUBCASE("never stop is cut off at max_steps") {
    const Episode ep = fixtures::episode_on(line_world(20), {0, 1, 2});
    NeverStopPolicy go;
    NavConfig nav;
    nav.max_steps = 5;
    const auto traj = rollout(go, ep, observer, nav);
    CHECK_FALSE(traj.stopped);
    CHECK(traj.steps.size() == 5);
    CHECK(traj.vertices == std::vector<int>{0, 1, 2, 3, 4, 5});
  }
  SUBCASE("max_steps must be positive") {
    AlwaysStopPolicy stop;
    NavConfig nav;
    nav.max_steps = 0;
    CHECK_THROWS_AS(rollout(stop, fixtures::spoke_episode(), observer, nav), Error);
  }
}

TEST_CASE("random walks are valid walks and moves follow geodesics") {
  const ObservationModel observer;
  int strictly_larger = 0;
  for (const auto& ep : fixtures::small_dataset().train) {
    RandomPolicy policy(static_cast<std::uint64_t>(ep.id) + 1);
    const auto traj = rollout(policy, ep, observer);
    const World& w = *ep.world;
    double total = 0.0;
    for (std::size_t i = 1; i < traj.vertices.size(); ++i) {
      const auto len = w.edge_length(traj.vertices[i - 1], traj.vertices[i]);
      REQUIRE(len.has_value());
      total += *len;
    }
    CHECK(traj.length == doctest::Approx(total).epsilon(1e-12));
    for (const auto& s : traj.steps) {
      if (s.decision.is_stop()) continue;
      CHECK(s.action_space.contains(*s.decision.target));
      CHECK(s.traversed_length == doctest::Approx(s.geodesic_at_decision).epsilon(1e-12));
      const auto& snap = traj.snapshots[s.snapshot];
      const auto local = build_action_space(snap, ActionScope::Local);
      for (const auto& e : local.entries) {
        if (e.node) CHECK(s.action_space.contains(*e.node));
      }
      if (s.action_space.size() > local.size()) ++strictly_larger;
    }
  }
  CHECK(strictly_larger > 0);
}

TEST_CASE("model policy emits a legal decision") {
  ModelConfig cfg;
  cfg.model_dim = 16;
  cfg.num_heads = 2;
  cfg.projector_hidden = 8;
  const auto model = init_model<float>(cfg);
  ModelPolicy<float> policy(model);
  const auto traj = rollout(policy, fixtures::spoke_episode(), ObservationModel());
  for (const auto& s : traj.steps) {
    CHECK(s.decision.action_logits.size() == s.action_space.entries.size());
    CHECK_FALSE(s.decision.out_of_space);
  }
}
