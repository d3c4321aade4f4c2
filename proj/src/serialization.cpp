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

#include "starnav/serialization.hpp"

#include <string>

#include "starnav/error.hpp"

namespace starnav {

void check_schema(const json& j, const char* what) {
  if (!j.contains("schema") || j.at("schema") != kSchemaVersion) {
    throw Error(ErrorCode::ConfigError, std::string(what) + ": unsupported or missing schema version");
  }
}

namespace {

NodeStatus status_from_string(const std::string& s) {
  if (s == "current") return NodeStatus::Current;
  if (s == "visited") return NodeStatus::Visited;
  if (s == "candidate") return NodeStatus::Candidate;
  throw Error(ErrorCode::ConfigError, "unknown node status '" + s + "'");
}

json optional_node(const std::optional<NodeId>& n) { return n ? json(n->value) : json(nullptr); }

}  // namespace

json to_json(const TopoGraph& graph) {
  json nodes = json::array();
  for (const auto& n : graph.nodes()) {
    json observers = json::array();
    for (NodeId o : n.observers) observers.push_back(o.value);
    nodes.push_back({{"id", n.id.value},
                     {"status", to_string(n.status)},
                     {"vertex", n.observation.vertex},
                     {"x", n.observation.position.x()},
                     {"y", n.observation.position.y()},
                     {"observers", observers},
                     {"first_seen", n.first_seen_step}});
  }
  json edges = json::array();
  for (const auto& e : graph.edges()) edges.push_back({e.a.value, e.b.value, e.length});
  return {{"step", graph.step()}, {"nodes", nodes}, {"edges", edges}};
}

TopoGraph graph_from_json(const json& j) {
  std::vector<MapNode> nodes;
  for (const auto& n : j.at("nodes")) {
    MapNode m;
    m.id = NodeId{n.at("id").get<int>()};
    m.status = status_from_string(n.at("status").get<std::string>());
    m.observation.vertex = n.at("vertex").get<int>();
    m.observation.position = {n.at("x").get<double>(), n.at("y").get<double>()};
    for (const auto& o : n.at("observers")) m.observers.push_back(NodeId{o.get<int>()});
    m.first_seen_step = n.value("first_seen", 0);
    nodes.push_back(std::move(m));
  }
  std::vector<MapEdge> edges;
  for (const auto& e : j.at("edges")) edges.push_back({NodeId{e.at(0).get<int>()}, NodeId{e.at(1).get<int>()}, e.at(2).get<double>()});
  return TopoGraph::restore(std::move(nodes), edges, j.at("step").get<int>());
}

json to_json(const World& world) {
  json pos = json::array();
  for (const auto& p : world.positions) pos.push_back({p.x(), p.y()});
  json edges = json::array();
  for (int a = 0; a < world.size(); ++a) {
    for (const auto& [b, w] : world.adjacency[a]) {
      if (a < b) edges.push_back({a, b});
    }
  }
  return {{"seed", world.seed}, {"positions", pos}, {"edges", edges}, {"landmarks", world.landmarks}};
}

World world_from_json(const json& j) {
  std::vector<Eigen::Vector2d> pos;
  for (const auto& p : j.at("positions")) pos.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return make_world(std::move(pos), edges, j.at("landmarks").get<std::vector<int>>(), j.at("seed").get<std::uint64_t>());
}

json to_json(const Episode& ep) {
  return {{"id", ep.id},           {"world_id", ep.world_id},       {"start", ep.start},
          {"goal", ep.goal},       {"instruction", ep.instruction}, {"gt_path", ep.gt_path},
          {"seed", ep.seed}};
}

Episode episode_from_json(const json& j, const std::vector<std::shared_ptr<const World>>& worlds) {
  Episode ep;
  ep.id = j.at("id").get<int>();
  ep.world_id = j.at("world_id").get<int>();
  if (ep.world_id < 0 || ep.world_id >= static_cast<int>(worlds.size())) {
    throw Error(ErrorCode::ConfigError, "episode refers to unknown world " + std::to_string(ep.world_id));
  }
  ep.world = worlds[ep.world_id];
  ep.start = j.at("start").get<int>();
  ep.goal = j.at("goal").get<int>();
  ep.instruction = j.at("instruction").get<std::vector<int>>();
  ep.gt_path = j.at("gt_path").get<std::vector<int>>();
  ep.seed = j.at("seed").get<std::uint64_t>();
  return ep;
}

json to_json(const SapSample& s) {
  return {{"schema", kSchemaVersion},
          {"episode_id", s.episode_id},
          {"step", s.step},
          {"graph", to_json(s.graph)},
          {"gt_action", optional_node(s.gt_action.target)}};
}

SapSample sample_from_json(const json& j, const std::function<const World&(int)>& world_of,
                           const ObservationModel& observer) {
  check_schema(j, "sap sample");
  SapSample s;
  s.episode_id = j.at("episode_id").get<int>();
  s.step = j.at("step").get<int>();
  s.graph = graph_from_json(j.at("graph"));
  if (!j.at("gt_action").is_null()) s.gt_action.target = NodeId{j.at("gt_action").get<int>()};
  s.observations = observer.observe(world_of(s.episode_id), s.graph);
  return s;
}

json to_json(const ActionSpace& space) {
  json out = json::array();
  for (std::size_t i = 0; i < space.entries.size(); ++i) {
    out.push_back({{"index", i}, {"node", optional_node(space.entries[i].node)}, {"token", space.entries[i].token}});
  }
  return out;
}

json to_json(const Decision& d) {
  return {{"target", optional_node(d.target)},
          {"token", d.token},
          {"out_of_space", d.out_of_space},
          {"action_logits", d.action_logits}};
}

json to_json(const StepRecord& r) {
  json traversed = json::array();
  for (NodeId n : r.traversed) traversed.push_back(n.value);
  return {{"step", r.step},
          {"snapshot", r.snapshot},
          {"action_space", to_json(r.action_space)},
          {"decision", to_json(r.decision)},
          {"traversed", traversed},
          {"traversed_length", r.traversed_length},
          {"geodesic_at_decision", r.geodesic_at_decision}};
}

json to_json(const EpisodeRecord& r) {
  return {{"episode_id", r.episode_id},
          {"tl", r.trajectory_length},
          {"ne", r.navigation_error},
          {"success", r.success},
          {"oracle_success", r.oracle_success},
          {"spl", r.spl},
          {"stopped", r.stopped}};
}

EpisodeRecord episode_record_from_json(const json& j) {
  EpisodeRecord r;
  r.episode_id = j.at("episode_id").get<int>();
  r.trajectory_length = j.at("tl").get<double>();
  r.navigation_error = j.at("ne").get<double>();
  r.success = j.at("success").get<bool>();
  r.oracle_success = j.at("oracle_success").get<bool>();
  r.spl = j.at("spl").get<double>();
  r.stopped = j.value("stopped", false);
  return r;
}

json to_json(const MetricsReport& m) {
  return {{"schema", kSchemaVersion}, {"episodes", m.count}, {"tl", m.tl},   {"ne", m.ne},
          {"sr", m.sr},               {"osr", m.osr},        {"spl", m.spl}};
}

json to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size}, {"d_obs", c.d_obs},
          {"model_dim", c.model_dim},   {"num_heads", c.num_heads},
          {"num_layers", c.num_layers}, {"ffn_mult", c.ffn_mult},
          {"projector_hidden", c.projector_hidden}, {"causal", c.causal},
          {"positional", c.positional}, {"seed", c.seed}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<int>();
  c.d_obs = j.at("d_obs").get<int>();
  c.model_dim = j.at("model_dim").get<int>();
  c.num_heads = j.at("num_heads").get<int>();
  c.num_layers = j.at("num_layers").get<int>();
  c.ffn_mult = j.at("ffn_mult").get<int>();
  c.projector_hidden = j.at("projector_hidden").get<int>();
  c.causal = j.at("causal").get<bool>();
  c.positional = j.at("positional").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}, {"steps", c.steps},
          {"seed", c.seed},                   {"star_att", c.star_att},     {"inp", c.inp},
          {"global_action", c.global_action}, {"eval_interval", c.eval_interval},
          {"beta1", c.beta1},                 {"beta2", c.beta2},           {"epsilon", c.epsilon},
          {"grad_clip", c.grad_clip}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.steps = j.at("steps").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.star_att = j.at("star_att").get<bool>();
  c.inp = j.at("inp").get<bool>();
  c.global_action = j.at("global_action").get<bool>();
  c.eval_interval = j.at("eval_interval").get<int>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.grad_clip = j.at("grad_clip").get<double>();
  return c;
}

json to_json(const ObservationConfig& c) {
  return {{"d_obs", c.d_obs},           {"panorama_tokens", c.panorama_tokens}, {"view_tokens", c.view_tokens},
          {"max_views", c.max_views},   {"bearing_bins", c.bearing_bins},       {"noise_std", c.noise_std},
          {"encoder_seed", c.encoder_seed}};
}

ObservationConfig observation_config_from_json(const json& j) {
  ObservationConfig c;
  c.d_obs = j.at("d_obs").get<int>();
  c.panorama_tokens = j.at("panorama_tokens").get<int>();
  c.view_tokens = j.at("view_tokens").get<int>();
  c.max_views = j.at("max_views").get<int>();
  c.bearing_bins = j.at("bearing_bins").get<int>();
  c.noise_std = j.at("noise_std").get<double>();
  c.encoder_seed = j.at("encoder_seed").get<std::uint64_t>();
  return c;
}

}  // namespace starnav
