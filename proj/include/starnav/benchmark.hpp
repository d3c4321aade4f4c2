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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "starnav/dataset.hpp"
#include "starnav/metrics.hpp"
#include "starnav/run_config.hpp"

namespace starnav {

enum class Variant { Full, NoStarAtt, NoInp, LocalActions };

std::string to_string(Variant variant);
std::optional<Variant> parse_variant(std::string_view name);

/// The train config with one component switched off.
TrainConfig apply_variant(TrainConfig config, Variant variant);

struct VariantRun {
  Variant variant = Variant::Full;
  std::uint64_t seed = 0;
  MetricsReport report;
  double final_loss = 0.0;
  double seconds = 0.0;
};

struct SweepResult {
  std::vector<VariantRun> runs;

  /// Mean unseen SR over all seeds of one variant.
  double mean_sr(Variant variant) const;
  double mean_spl(Variant variant) const;
};

using SweepProgress = std::function<void(const VariantRun&)>;

/// Trains and evaluates every (variant, seed) pair on the dataset's held-out split.
/// The seed drives both model initialization and batch order.
SweepResult run_sweep(const Dataset& dataset, const RunConfig& config, std::span<const Variant> variants,
                      std::span<const std::uint64_t> seeds, const SweepProgress& progress = {});

std::string format_sweep(const SweepResult& result);

}  // namespace starnav
