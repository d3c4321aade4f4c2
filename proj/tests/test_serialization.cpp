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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "starnav/dataset.hpp"
#include "starnav/error.hpp"
#include "starnav/serialization.hpp"
#include "starnav/trajectory_dump.hpp"

using namespace starnav;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("starnav_unit_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

void check_same_graph(const TopoGraph& a, const TopoGraph& b) {
  REQUIRE(a.size() == b.size());
  CHECK(a.step() == b.step());
  CHECK(a.current() == b.current());
  for (int i = 0; i < a.size(); ++i) {
    const auto& x = a.nodes()[i];
    const auto& y = b.nodes()[i];
    CHECK(x.status == y.status);
    CHECK(x.observation.vertex == y.observation.vertex);
    CHECK(x.observation.position == y.observation.position);
    CHECK(x.observers == y.observers);
  }
  const auto ea = a.edges();
  const auto eb = b.edges();
  REQUIRE(ea.size() == eb.size());
  for (std::size_t i = 0; i < ea.size(); ++i) {
    CHECK(ea[i].a == eb[i].a);
    CHECK(ea[i].b == eb[i].b);
    CHECK(ea[i].length == eb[i].length);
  }
}

}  // namespace

TEST_CASE("graph and world records round-trip") {
  for (const auto& s : fixtures::small_dataset().train_samples) {
    check_same_graph(graph_from_json(to_json(s.graph)), s.graph);
  }
  const World& w = *fixtures::small_dataset().worlds.front();
  const World back = world_from_json(to_json(w));
  CHECK(back.positions == w.positions);
  CHECK(back.adjacency == w.adjacency);
  CHECK(back.landmarks == w.landmarks);
  CHECK(back.seed == w.seed);
  CHECK(back.geodesic == w.geodesic);
}

TEST_CASE("schema version is enforced") {
  const auto& ds = fixtures::small_dataset();
  const ObservationModel observer(ds.config.observation);
  auto world_of = [&](int id) -> const World& { return *ds.find_episode(id)->world; };
  json j = to_json(ds.train_samples.front());
  CHECK_NOTHROW(sample_from_json(j, world_of, observer));
  j["schema"] = kSchemaVersion + 1;
  CHECK_THROWS_AS(sample_from_json(j, world_of, observer), Error);
  j.erase("schema");
  CHECK_THROWS_AS(sample_from_json(j, world_of, observer), Error);
}

TEST_CASE("dataset files are deterministic and reload exactly") {
  const auto a = scratch("ds_a");
  const auto b = scratch("ds_b");
  const Dataset ds = generate_dataset(3, fixtures::small_dataset_config());
  write_dataset(ds, a);
  write_dataset(generate_dataset(3, fixtures::small_dataset_config()), b);
  for (const char* f : {"manifest.json", "worlds.jsonl", "episodes.jsonl", "sap_train.jsonl", "sap_val.jsonl"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const Dataset back = load_dataset(a);
  REQUIRE(back.train.size() == ds.train.size());
  REQUIRE(back.train_samples.size() == ds.train_samples.size());
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    CHECK(back.train[i].gt_path == ds.train[i].gt_path);
    CHECK(back.train[i].instruction == ds.train[i].instruction);
    CHECK(back.train[i].world_id == ds.train[i].world_id);
  }
  for (std::size_t i = 0; i < ds.train_samples.size(); ++i) {
    const auto& x = back.train_samples[i];
    const auto& y = ds.train_samples[i];
    check_same_graph(x.graph, y.graph);
    CHECK(x.observations.panorama() == y.observations.panorama());
    CHECK(x.gt_action.target == y.gt_action.target);
  }
  // Rewriting a loaded dataset reproduces the same bytes.
  const auto c = scratch("ds_c");
  write_dataset(back, c);
  CHECK(slurp(a / "sap_train.jsonl") == slurp(c / "sap_train.jsonl"));
  CHECK_THROWS_AS(load_dataset(scratch("ds_missing")), Error);
}

TEST_CASE("trajectory dumps round-trip") {
  const Episode ep = fixtures::episode_on(fixtures::spoke_world(), {0, 4, 6});
  ScriptedPolicy policy({1, 4, 6, -1});
  const auto dump = record_rollout(policy, "scripted", ep, ObservationModel(), NavConfig{});
  REQUIRE(dump.steps.size() == 4);
  CHECK(dump.steps[1].traversed.size() == 3);
  CHECK(dump.steps.back().decision.is_stop());
  CHECK(dump.stopped);
  CHECK(dump.walk == std::vector<int>{0, 1, 0, 4, 6});
  CHECK_FALSE(dump.steps[0].prompt.empty());

  const json j = to_json(dump);
  const auto back = trajectory_dump_from_json(json::parse(j.dump()));
  CHECK(to_json(back) == j);
  REQUIRE(back.snapshots.size() == dump.snapshots.size());
  for (std::size_t i = 0; i < dump.snapshots.size(); ++i) check_same_graph(back.snapshots[i], dump.snapshots[i]);
  CHECK(back.steps[1].traversed == dump.steps[1].traversed);
  CHECK(back.record.spl == dump.record.spl);

  json bad = j;
  bad["steps"][0]["snapshot"] = 99;
  CHECK_THROWS(trajectory_dump_from_json(bad));
}

TEST_CASE("config and record round-trips") {
  ModelConfig m;
  m.model_dim = 48;
  m.causal = false;
  m.seed = 12345678901234ULL;
  CHECK(model_config_from_json(to_json(m)) == m);
  TrainConfig t;
  t.learning_rate = 1.2345e-4;
  t.global_action = false;
  CHECK(train_config_from_json(to_json(t)) == t);
  ObservationConfig o;
  o.noise_std = 0.125;
  CHECK(observation_config_from_json(to_json(o)).noise_std == 0.125);

  EpisodeRecord r;
  r.episode_id = 4;
  r.trajectory_length = 7.25;
  r.navigation_error = 1.5;
  r.success = true;
  r.oracle_success = true;
  r.spl = 0.75;
  r.stopped = true;
  const auto back = episode_record_from_json(to_json(r));
  CHECK(back.episode_id == 4);
  CHECK(back.trajectory_length == 7.25);
  CHECK(back.spl == 0.75);
  CHECK(back.success);
}
