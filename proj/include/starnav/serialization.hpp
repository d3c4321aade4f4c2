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

#include <functional>
#include <memory>

#include <json.hpp>

#include "starnav/agent.hpp"
#include "starnav/env.hpp"
#include "starnav/metrics.hpp"
#include "starnav/star_transformer.hpp"
#include "starnav/topo_graph.hpp"
#include "starnav/trainer.hpp"

namespace starnav {

using json = nlohmann::json;

/// Bumped whenever any persisted record changes shape.
inline constexpr int kSchemaVersion = 1;

json to_json(const TopoGraph& graph);
TopoGraph graph_from_json(const json& j);

json to_json(const World& world);
World world_from_json(const json& j);

json to_json(const Episode& episode);
/// `worlds` is indexed by world id.
Episode episode_from_json(const json& j, const std::vector<std::shared_ptr<const World>>& worlds);

/// Observations are not stored; they are regenerated from (world, graph).
json to_json(const SapSample& sample);
SapSample sample_from_json(const json& j, const std::function<const World&(int episode_id)>& world_of,
                           const ObservationModel& observer);

json to_json(const ActionSpace& space);
json to_json(const Decision& decision);
json to_json(const StepRecord& record);

json to_json(const EpisodeRecord& record);
EpisodeRecord episode_record_from_json(const json& j);
json to_json(const MetricsReport& report);

json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const json& j);
json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const json& j);
json to_json(const ObservationConfig& config);
ObservationConfig observation_config_from_json(const json& j);

/// Throws ConfigError unless `j["schema"]` equals kSchemaVersion.
void check_schema(const json& j, const char* what);

}  // namespace starnav
