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

#include "starnav/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "starnav/error.hpp"
#include "starnav/trainer.hpp"

namespace starnav {

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::Full: return "full";
    case Variant::NoStarAtt: return "no-star-att";
    case Variant::NoInp: return "no-inp";
    case Variant::LocalActions: return "local-actions";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : {Variant::Full, Variant::NoStarAtt, Variant::NoInp, Variant::LocalActions}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

TrainConfig apply_variant(TrainConfig config, Variant variant) {
  switch (variant) {
    case Variant::Full: break;
    case Variant::NoStarAtt: config.star_att = false; break;
    case Variant::NoInp: config.inp = false; break;
    case Variant::LocalActions: config.global_action = false; break;
  }
  return config;
}

namespace {

template <class F>
double mean_over(const std::vector<VariantRun>& runs, Variant variant, F field) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : runs) {
    if (r.variant != variant) continue;
    sum += field(r.report);
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::EmptyEvaluation, "no runs for variant " + to_string(variant));
  return sum / n;
}

}  // namespace

double SweepResult::mean_sr(Variant variant) const {
  return mean_over(runs, variant, [](const MetricsReport& m) { return m.sr; });
}

double SweepResult::mean_spl(Variant variant) const {
  return mean_over(runs, variant, [](const MetricsReport& m) { return m.spl; });
}

SweepResult run_sweep(const Dataset& dataset, const RunConfig& config, std::span<const Variant> variants,
                      std::span<const std::uint64_t> seeds, const SweepProgress& progress) {
  const ObservationModel observer(dataset.config.observation);
  const auto instructions = dataset.instructions();
  SweepResult out;
  for (Variant variant : variants) {
    const TrainConfig base = apply_variant(config.train, variant);
    const NavConfig nav = base.nav(config.max_steps);
    const auto prepared = prepare_samples(dataset.train_samples, instructions, nav);
    for (std::uint64_t seed : seeds) {
      const auto start = std::chrono::steady_clock::now();
      ModelConfig model_config = config.model;
      model_config.d_obs = dataset.config.observation.d_obs;
      model_config.seed = seed;
      TrainConfig train_config = base;
      train_config.seed = seed;
      TrainState state = init_train_state(model_config);
      train_steps(state, prepared, train_config);
      VariantRun run;
      run.variant = variant;
      run.seed = seed;
      run.final_loss = mean_loss(state.model, prepared);
      run.report = evaluate_split(state.model, dataset.val, observer, nav, config.success_radius);
      run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (progress) progress(run);
      out.runs.push_back(std::move(run));
    }
  }
  return out;
}

std::string format_sweep(const SweepResult& result) {
  std::string out = "variant          seed      SR     SPL     OSR      TL      NE   train-loss\n";
  char line[160];
  for (const auto& r : result.runs) {
    std::snprintf(line, sizeof line, "%-15s %5llu %7.2f %7.2f %7.2f %7.2f %7.2f %10.4f\n", to_string(r.variant).c_str(),
                  static_cast<unsigned long long>(r.seed), r.report.sr, r.report.spl, r.report.osr, r.report.tl,
                  r.report.ne, r.final_loss);
    out += line;
  }
  std::vector<Variant> seen;
  for (const auto& r : result.runs) {
    if (std::find(seen.begin(), seen.end(), r.variant) == seen.end()) seen.push_back(r.variant);
  }
  for (Variant v : seen) {
    std::snprintf(line, sizeof line, "mean %-15s SR %6.2f  SPL %6.2f\n", to_string(v).c_str(), result.mean_sr(v),
                  result.mean_spl(v));
    out += line;
  }
  return out;
}

}  // namespace starnav
