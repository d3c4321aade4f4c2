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

#include "starnav/trainer.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "starnav/error.hpp"
#include "starnav/random.hpp"

namespace starnav {

TrainConfig TrainConfig::reference_preset() {
  TrainConfig c;
  c.learning_rate = kReferenceLearningRate;
  c.batch_size = 16;
  return c;
}

NavConfig TrainConfig::nav(int max_steps) const {
  NavConfig n;
  n.max_steps = max_steps;
  n.scope = global_action ? ActionScope::Global : ActionScope::Local;
  n.layout = inp ? PromptLayout::Interleaved : PromptLayout::Flat;
  n.star_att = star_att;
  return n;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || batch_size < 1 || steps < 0 || eval_interval < 0 || !(beta1 >= 0.0 && beta1 < 1.0) ||
      !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0) || grad_clip < 0.0) {
    throw Error(ErrorCode::ConfigError, "invalid training configuration");
  }
}

Eigen::MatrixXd PreparedSample::affinity() const {
  if (distances.size() == 0) return Eigen::MatrixXd::Zero(prompt.length(), prompt.length());
  return expand_affinity(distances, prompt);
}

std::vector<PreparedSample> prepare_samples(std::span<const SapSample> samples,
                                            const std::map<int, std::vector<int>>& instructions,
                                            const NavConfig& nav) {
  std::vector<PreparedSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const auto it = instructions.find(s.episode_id);
    if (it == instructions.end()) {
      throw Error(ErrorCode::InconsistentState, "sample refers to unknown episode " + std::to_string(s.episode_id));
    }
    const ActionSpace space = build_action_space(s.graph, nav.scope);
    const auto index = space.index_of(s.gt_action);
    if (!index) throw Error(ErrorCode::InconsistentState, "ground-truth action is outside the action space");
    PreparedSample p;
    p.prompt = build_inp(default_system_prompt(), it->second, s.graph, s.observations, space, nav.layout);
    if (nav.star_att) p.distances = pairwise_distances(s.graph);
    p.gt_token = space.entries[*index].token;
    p.episode_id = s.episode_id;
    p.step = s.step;
    out.push_back(std::move(p));
  }
  return out;
}

TrainState init_train_state(const ModelConfig& config) {
  TrainState s;
  s.model = init_model<float>(config);
  s.adam.m = s.model.params.zeros_like();
  s.adam.v = s.model.params.zeros_like();
  return s;
}

namespace {

// Position `k` of the concatenated per-epoch permutations of [0, n).
class BatchOrder {
 public:
  BatchOrder(std::uint64_t seed, int n) : seed_(seed), n_(n) {}

  int at(long long k) {
    const long long epoch = k / n_;
    if (epoch != epoch_) {
      perm_.resize(n_);
      std::iota(perm_.begin(), perm_.end(), 0);
      Rng rng(mix_seed({seed_, 0x6f72646572ULL, static_cast<std::uint64_t>(epoch)}));
      rng.shuffle(perm_.begin(), perm_.end());
      epoch_ = epoch;
    }
    return perm_[k % n_];
  }

 private:
  std::uint64_t seed_;
  int n_;
  long long epoch_ = -1;
  std::vector<int> perm_;
};

void adam_update(ModelParams<float>& params, const ModelParams<float>& grad, AdamState<float>& adam,
                 const TrainConfig& c) {
  ++adam.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(adam.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(adam.step));
  const float lr = static_cast<float>(c.learning_rate);
  const float b1 = static_cast<float>(c.beta1), b2 = static_cast<float>(c.beta2);
  const float eps = static_cast<float>(c.epsilon);
  const float inv_bc1 = static_cast<float>(1.0 / bc1), inv_bc2 = static_cast<float>(1.0 / bc2);

  std::vector<const MatrixX<float>*> g;
  grad.for_each([&g](const std::string&, const MatrixX<float>& m) { g.push_back(&m); });
  std::vector<MatrixX<float>*> m1, m2;
  adam.m.for_each([&m1](const std::string&, MatrixX<float>& m) { m1.push_back(&m); });
  adam.v.for_each([&m2](const std::string&, MatrixX<float>& m) { m2.push_back(&m); });
  std::size_t i = 0;
  params.for_each([&](const std::string&, MatrixX<float>& p) {
    auto& m = *m1[i];
    auto& v = *m2[i];
    const auto& gi = *g[i];
    m = b1 * m + (1.0f - b1) * gi;
    v = b2 * v + (1.0f - b2) * gi.cwiseProduct(gi);
    p.array() -= lr * (m.array() * inv_bc1) / ((v.array() * inv_bc2).sqrt() + eps);
    ++i;
  });
}

double global_norm(const ModelParams<float>& grad) {
  double sq = 0.0;
  grad.for_each([&sq](const std::string&, const MatrixX<float>& m) { sq += m.cast<double>().squaredNorm(); });
  return std::sqrt(sq);
}

}  // namespace

void train_steps(TrainState& state, std::span<const PreparedSample> data, const TrainConfig& config,
                 const StepHook& hook) {
  config.validate();
  if (data.empty()) throw Error(ErrorCode::ConfigError, "training set is empty");
  BatchOrder order(config.seed, static_cast<int>(data.size()));
  ModelParams<float> grad = state.model.params.zeros_like();
  const float scale = 1.0f / static_cast<float>(config.batch_size);

  while (state.step < config.steps) {
    grad.for_each([](const std::string&, MatrixX<float>& m) { m.setZero(); });
    double loss_sum = 0.0;
    for (int b = 0; b < config.batch_size; ++b) {
      const auto& sample = data[order.at(static_cast<long long>(state.step) * config.batch_size + b)];
      const auto trace = forward(state.model, sample.prompt, sample.affinity(), ForwardMode::DecisionOnly);
      loss_sum += sap_loss(trace, sample.gt_token);
      backward_accumulate(state.model, trace, sample.gt_token, scale, grad);
    }
    const double loss = loss_sum / config.batch_size;
    const double norm = global_norm(grad);
    if (!std::isfinite(loss) || !std::isfinite(norm)) {
      throw Error(ErrorCode::Divergence, "non-finite loss or gradient at step " + std::to_string(state.step + 1) +
                                             " (loss " + std::to_string(loss) + ", grad norm " + std::to_string(norm) + ")");
    }
    if (config.grad_clip > 0.0 && norm > config.grad_clip) {
      const float f = static_cast<float>(config.grad_clip / norm);
      grad.for_each([f](const std::string&, MatrixX<float>& m) { m *= f; });
    }
    adam_update(state.model.params, grad, state.adam, config);
    ++state.step;
    state.loss_curve.push_back(loss);
    if (hook) hook(state, state.step, loss);
  }
}

TrainResult train(std::span<const SapSample> samples, const std::map<int, std::vector<int>>& instructions,
                  const ModelConfig& model_config, const TrainConfig& config, const StepHook& hook) {
  if (samples.empty()) throw Error(ErrorCode::ConfigError, "training set is empty");
  const auto data = prepare_samples(samples, instructions, config.nav());
  TrainState state = init_train_state(model_config);
  train_steps(state, data, config, hook);
  return {std::move(state.model), std::move(state.loss_curve)};
}

double mean_loss(const StarModel<float>& model, std::span<const PreparedSample> data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : data) {
    total += sap_loss(forward(model, s.prompt, s.affinity(), ForwardMode::DecisionOnly), s.gt_token);
  }
  return total / static_cast<double>(data.size());
}

MetricsReport evaluate_split(Policy& policy, std::span<const Episode> episodes, const ObservationModel& observer,
                             const NavConfig& nav, double success_radius) {
  std::vector<EpisodeRecord> records;
  records.reserve(episodes.size());
  for (const auto& ep : episodes) {
    records.push_back(score_episode(rollout(policy, ep, observer, nav), ep, success_radius));
  }
  return aggregate(records);
}

MetricsReport evaluate_split(const StarModel<float>& model, std::span<const Episode> episodes,
                             const ObservationModel& observer, const NavConfig& nav, double success_radius) {
  ModelPolicy<float> policy(model);
  return evaluate_split(policy, episodes, observer, nav, success_radius);
}

}  // namespace starnav
