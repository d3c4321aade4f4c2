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

#include "starnav/star_transformer.hpp"
#include "starnav/trainer.hpp"

namespace starnav {

/// Binary checkpoint: magic "STARNAV\0", format version, model-config hash,
/// JSON header {model, train}, step counters, then every parameter tensor and
/// both Adam moment sets as (name, rows, cols, float32 data), little-endian.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  TrainState state;
  TrainConfig train_config;
  std::uint64_t config_hash = 0;
};

std::uint64_t config_hash(const ModelConfig& config);

void save_checkpoint(const std::filesystem::path& path, const TrainState& state, const TrainConfig& train_config);

Checkpoint load_checkpoint(const std::filesystem::path& path);

/// As above, but a model config differing from `expected` is a ConfigError.
Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected);

}  // namespace starnav
