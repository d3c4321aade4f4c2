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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "starnav/agent.hpp"
#include "starnav/env.hpp"
#include "starnav/metrics.hpp"
#include "starnav/star_transformer.hpp"

namespace starnav {

struct TrainConfig {
  double learning_rate = 3e-4;
  int batch_size = 16;
  int steps = 2000;
  std::uint64_t seed = 0;
  bool star_att = true;
  bool inp = true;
  bool global_action = true;
  int eval_interval = 0;  // 0 disables periodic evaluation
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double grad_clip = 1.0;  // global L2 norm; 0 disables

  /// Learning rate used for the pretrained large backbones.
  static constexpr double kReferenceLearningRate = 1e-5;
  static TrainConfig reference_preset();

  NavConfig nav(int max_steps = 15) const;
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

template <class Scalar>
struct AdamState {
  ModelParams<Scalar> m;
  ModelParams<Scalar> v;
  long long step = 0;
};

/// One teacher-forced training example with its prompt already assembled.
struct PreparedSample {
  PromptSequence prompt;
  DistanceMatrix distances;  // empty when the distance bias is switched off
  int gt_token = 0;
  int episode_id = 0;
  int step = 0;

  Eigen::MatrixXd affinity() const;
};

/// Builds prompts and labels honouring the ablation switches in `nav`.
/// `instructions` maps episode id to its instruction tokens.
std::vector<PreparedSample> prepare_samples(std::span<const SapSample> samples,
                                            const std::map<int, std::vector<int>>& instructions,
                                            const NavConfig& nav);

struct TrainState {
  StarModel<float> model;
  AdamState<float> adam;
  int step = 0;
  std::vector<double> loss_curve;
};

TrainState init_train_state(const ModelConfig& config);

/// Called after every optimizer step with the step index (1-based) and mean batch loss.
using StepHook = std::function<void(const TrainState&, int step, double loss)>;

/// Runs optimizer steps until `state.step == config.steps`. Batch order is a
/// pure function of (seed, step), so resuming from a checkpoint continues the
/// same sequence.
void train_steps(TrainState& state, std::span<const PreparedSample> data, const TrainConfig& config,
                 const StepHook& hook = {});

struct TrainResult {
  StarModel<float> model;
  std::vector<double> loss_curve;
};

TrainResult train(std::span<const SapSample> samples, const std::map<int, std::vector<int>>& instructions,
                  const ModelConfig& model_config, const TrainConfig& config, const StepHook& hook = {});

/// Mean SAP loss over `data` without updating anything.
double mean_loss(const StarModel<float>& model, std::span<const PreparedSample> data);

MetricsReport evaluate_split(Policy& policy, std::span<const Episode> episodes, const ObservationModel& observer,
                             const NavConfig& nav, double success_radius = kSuccessRadius);

MetricsReport evaluate_split(const StarModel<float>& model, std::span<const Episode> episodes,
                             const ObservationModel& observer, const NavConfig& nav,
                             double success_radius = kSuccessRadius);

}  // namespace starnav
