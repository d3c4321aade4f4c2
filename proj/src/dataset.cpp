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

#include "starnav/dataset.hpp"

#include <fstream>
#include <set>
#include <string>

#include "starnav/error.hpp"
#include "starnav/random.hpp"
#include "starnav/serialization.hpp"

namespace starnav {

void DatasetConfig::validate() const {
  if (train_worlds < 1 || val_worlds < 1 || train_episodes_per_world < 1 || val_episodes_per_world < 1) {
    throw Error(ErrorCode::ConfigError, "dataset split sizes must be positive");
  }
  if (episode.min_path_nodes < 2 || episode.max_path_nodes < episode.min_path_nodes) {
    throw Error(ErrorCode::ConfigError, "invalid episode path length bounds");
  }
  if (world.num_nodes < 8 || world.num_nodes > 40) throw Error(ErrorCode::ConfigError, "world node count must be in [8, 40]");
}

std::map<int, std::vector<int>> Dataset::instructions() const {
  std::map<int, std::vector<int>> out;
  for (const auto* split : {&train, &val}) {
    for (const auto& ep : *split) out[ep.id] = ep.instruction;
  }
  return out;
}

const Episode* Dataset::find_episode(int id) const {
  for (const auto* split : {&train, &val}) {
    for (const auto& ep : *split) {
      if (ep.id == id) return &ep;
    }
  }
  return nullptr;
}

Dataset generate_dataset(std::uint64_t seed, const DatasetConfig& config) {
  config.validate();
  Dataset ds;
  ds.config = config;
  ds.seed = seed;
  const ObservationModel observer(config.observation);
  int next_episode = 0;
  std::set<std::uint64_t> seen_seeds;

  auto build_split = [&](int worlds, int per_world, std::uint64_t tag, std::vector<Episode>& episodes,
                         std::vector<SapSample>& samples) {
    for (int w = 0; w < worlds; ++w) {
      const std::uint64_t world_seed = mix_seed({seed, tag, static_cast<std::uint64_t>(w)});
      if (!seen_seeds.insert(world_seed).second) throw Error(ErrorCode::GenerationFailure, "world seed collision");
      auto world = std::make_shared<const World>(generate_world(world_seed, config.world));
      const int world_id = static_cast<int>(ds.worlds.size());
      ds.worlds.push_back(world);
      ds.world_seeds.push_back(world_seed);
      for (int e = 0; e < per_world; ++e) {
        Episode ep = generate_episode(world, mix_seed({world_seed, static_cast<std::uint64_t>(e)}), config.episode);
        ep.id = next_episode++;
        ep.world_id = world_id;
        auto s = make_sap_samples(ep, observer);
        samples.insert(samples.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
        episodes.push_back(std::move(ep));
      }
    }
  };
  build_split(config.train_worlds, config.train_episodes_per_world, 1, ds.train, ds.train_samples);
  build_split(config.val_worlds, config.val_episodes_per_world, 2, ds.val, ds.val_samples);
  return ds;
}

namespace {

void write_lines(const std::filesystem::path& path, const std::vector<json>& lines) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& l : lines) os << l.dump() << '\n';
  if (!os) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::vector<json> read_lines(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<json> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

json dataset_config_json(const DatasetConfig& c) {
  return {{"world",
           {{"num_nodes", c.world.num_nodes},
            {"box_size", c.world.box_size},
            {"num_landmarks", c.world.num_landmarks},
            {"min_separation", c.world.min_separation},
            {"target_degree", c.world.target_degree},
            {"max_attempts", c.world.max_attempts}}},
          {"episode",
           {{"min_path_nodes", c.episode.min_path_nodes},
            {"max_path_nodes", c.episode.max_path_nodes},
            {"max_attempts", c.episode.max_attempts}}},
          {"observation", to_json(c.observation)},
          {"train_worlds", c.train_worlds},
          {"train_episodes_per_world", c.train_episodes_per_world},
          {"val_worlds", c.val_worlds},
          {"val_episodes_per_world", c.val_episodes_per_world}};
}

DatasetConfig dataset_config_from_json(const json& j) {
  DatasetConfig c;
  const auto& w = j.at("world");
  c.world.num_nodes = w.at("num_nodes").get<int>();
  c.world.box_size = w.at("box_size").get<double>();
  c.world.num_landmarks = w.at("num_landmarks").get<int>();
  c.world.min_separation = w.at("min_separation").get<double>();
  c.world.target_degree = w.at("target_degree").get<double>();
  c.world.max_attempts = w.at("max_attempts").get<int>();
  const auto& e = j.at("episode");
  c.episode.min_path_nodes = e.at("min_path_nodes").get<int>();
  c.episode.max_path_nodes = e.at("max_path_nodes").get<int>();
  c.episode.max_attempts = e.at("max_attempts").get<int>();
  c.observation = observation_config_from_json(j.at("observation"));
  c.train_worlds = j.at("train_worlds").get<int>();
  c.train_episodes_per_world = j.at("train_episodes_per_world").get<int>();
  c.val_worlds = j.at("val_worlds").get<int>();
  c.val_episodes_per_world = j.at("val_episodes_per_world").get<int>();
  return c;
}

}  // namespace

void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<json> worlds, episodes, train, val;
  for (std::size_t i = 0; i < ds.worlds.size(); ++i) {
    json w = to_json(*ds.worlds[i]);
    w["schema"] = kSchemaVersion;
    w["id"] = i;
    worlds.push_back(std::move(w));
  }
  json train_ids = json::array(), val_ids = json::array(), train_seeds = json::array(), val_seeds = json::array();
  std::set<int> train_worlds, val_worlds;
  for (const auto* split : {&ds.train, &ds.val}) {
    for (const auto& ep : *split) {
      json e = to_json(ep);
      e["schema"] = kSchemaVersion;
      e["split"] = split == &ds.train ? "train" : "val_unseen";
      episodes.push_back(std::move(e));
      (split == &ds.train ? train_worlds : val_worlds).insert(ep.world_id);
    }
  }
  for (int w : train_worlds) train_seeds.push_back(ds.world_seeds[w]);
  for (int w : val_worlds) val_seeds.push_back(ds.world_seeds[w]);
  for (const auto& s : ds.train_samples) train.push_back(to_json(s));
  for (const auto& s : ds.val_samples) val.push_back(to_json(s));

  write_lines(dir / "worlds.jsonl", worlds);
  write_lines(dir / "episodes.jsonl", episodes);
  write_lines(dir / "sap_train.jsonl", train);
  write_lines(dir / "sap_val.jsonl", val);

  const json manifest = {{"schema", kSchemaVersion},
                         {"seed", ds.seed},
                         {"config", dataset_config_json(ds.config)},
                         {"counts",
                          {{"worlds", ds.worlds.size()},
                           {"train_episodes", ds.train.size()},
                           {"val_unseen_episodes", ds.val.size()},
                           {"train_samples", ds.train_samples.size()},
                           {"val_samples", ds.val_samples.size()}}},
                         {"train_world_seeds", train_seeds},
                         {"val_world_seeds", val_seeds},
                         {"files", {"worlds.jsonl", "episodes.jsonl", "sap_train.jsonl", "sap_val.jsonl"}}};
  std::ofstream os(dir / "manifest.json", std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot write manifest");
  os << manifest.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream ms(dir / "manifest.json");
  if (!ms) throw Error(ErrorCode::IoError, "no manifest.json in " + dir.string());
  const json manifest = json::parse(ms);
  check_schema(manifest, "dataset manifest");

  Dataset ds;
  ds.seed = manifest.at("seed").get<std::uint64_t>();
  ds.config = dataset_config_from_json(manifest.at("config"));
  for (const auto& w : read_lines(dir / "worlds.jsonl")) {
    check_schema(w, "world record");
    if (w.at("id").get<std::size_t>() != ds.worlds.size()) throw Error(ErrorCode::ConfigError, "world ids out of order");
    ds.worlds.push_back(std::make_shared<const World>(world_from_json(w)));
    ds.world_seeds.push_back(w.at("seed").get<std::uint64_t>());
  }
  for (const auto& e : read_lines(dir / "episodes.jsonl")) {
    check_schema(e, "episode record");
    Episode ep = episode_from_json(e, ds.worlds);
    (e.at("split") == "train" ? ds.train : ds.val).push_back(std::move(ep));
  }
  const ObservationModel observer(ds.config.observation);
  std::map<int, const World*> world_of;
  for (const auto* split : {&ds.train, &ds.val}) {
    for (const auto& ep : *split) world_of[ep.id] = ep.world.get();
  }
  auto lookup = [&](int episode_id) -> const World& {
    const auto it = world_of.find(episode_id);
    if (it == world_of.end()) throw Error(ErrorCode::ConfigError, "sample refers to unknown episode");
    return *it->second;
  };
  for (const auto& s : read_lines(dir / "sap_train.jsonl")) ds.train_samples.push_back(sample_from_json(s, lookup, observer));
  for (const auto& s : read_lines(dir / "sap_val.jsonl")) ds.val_samples.push_back(sample_from_json(s, lookup, observer));

  const auto& counts = manifest.at("counts");
  if (counts.at("train_episodes").get<std::size_t>() != ds.train.size() ||
      counts.at("val_unseen_episodes").get<std::size_t>() != ds.val.size() ||
      counts.at("train_samples").get<std::size_t>() != ds.train_samples.size()) {
    throw Error(ErrorCode::ConfigError, "dataset files do not match the manifest counts");
  }
  return ds;
}

}  // namespace starnav
