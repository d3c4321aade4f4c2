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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <vector>

#include "starnav/env.hpp"

namespace starnav {

struct DatasetConfig {
  WorldConfig world;
  EpisodeConfig episode;
  ObservationConfig observation;
  int train_worlds = 60;
  int train_episodes_per_world = 5;
  int val_worlds = 40;
  int val_episodes_per_world = 5;

  void validate() const;
};

/// Train and held-out ("unseen") splits over disjoint world seeds.
struct Dataset {
  DatasetConfig config;
  std::uint64_t seed = 0;
  std::vector<std::shared_ptr<const World>> worlds;  // indexed by world id
  std::vector<std::uint64_t> world_seeds;
  std::vector<Episode> train;
  std::vector<Episode> val;
  std::vector<SapSample> train_samples;
  std::vector<SapSample> val_samples;

  std::map<int, std::vector<int>> instructions() const;
  const Episode* find_episode(int id) const;
};

Dataset generate_dataset(std::uint64_t seed, const DatasetConfig& config);

/// Files: manifest.json, worlds.jsonl, episodes.jsonl, sap_train.jsonl, sap_val.jsonl.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace starnav
