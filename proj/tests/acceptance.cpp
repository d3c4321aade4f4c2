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

// One line per acceptance criterion. Pass criterion numbers as arguments to run
// a subset; the exit status is nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "starnav/benchmark.hpp"
#include "starnav/dataset.hpp"
#include "starnav/metrics.hpp"
#include "starnav/run_config.hpp"
#include "starnav/trainer.hpp"

using namespace starnav;

namespace {

const std::string kConfigDir = std::string(STARNAV_SOURCE_DIR) + "/configs/";
constexpr std::uint64_t kBenchmarkDataSeed = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1. Zero affinity reproduces textbook multi-head attention.
Outcome zero_bias_identity() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const int heads = 1 + static_cast<int>(rng.below(4));
    const int dm = heads * (2 + static_cast<int>(rng.below(7)));
    const int L = 2 + static_cast<int>(rng.below(24));
    const auto params = oracle::random_attention(rng, dm, heads);
    Eigen::MatrixXd x(L, dm);
    oracle::fill_normal(x, rng, 1.0);
    for (bool causal : {false, true}) {
      const Eigen::MatrixXd got = star_attention<double>(x, Eigen::MatrixXd::Zero(L, L), params, causal);
      worst = std::max(worst, (got - oracle::naive_mha(x, params, causal)).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-12, fmt("50 seeds, max abs diff %.3g (tol 1e-12)", worst)};
}

// 2. Central differences against backprop, group by group.
Outcome gradient_check() {
  ModelConfig c;
  c.model_dim = 32;
  c.num_heads = 4;
  c.num_layers = 2;
  c.d_obs = 32;
  c.seed = 11;
  auto model = init_model<double>(c);
  Rng rng(12);
  model.params.for_each([&](const std::string&, Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] += 0.1 * rng.normal();
  });
  for (auto& b : model.params.blocks) oracle::fill_normal(b.attention.alpha, rng, 0.5);
  const auto in = fixtures::mixed_prompt(rng, c.d_obs);
  if (in.prompt.length() != 20) return {false, "fixture prompt is not 20 tokens"};

  auto analytic = backward(model, forward(model, in.prompt, in.d_hat), in.gt_token);
  auto numeric = oracle::central_differences(
      model, [&](const StarModel<double>& m) { return sap_loss(forward(m, in.prompt, in.d_hat), in.gt_token); }, 1e-5);
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> a, n;
  analytic.for_each([&a](const std::string& k, const Eigen::MatrixXd& m) { a.push_back({k, &m}); });
  numeric.for_each([&n](const std::string& k, const Eigen::MatrixXd& m) { n.push_back({k, &m}); });
  double worst = 0.0, worst_alpha = 0.0;
  bool alpha_moves = false;
  std::string worst_name;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = oracle::group_relative_error(*a[i].second, *n[i].second);
    if (e > worst) worst = e, worst_name = a[i].first;
    if (a[i].first.find("alpha") != std::string::npos) {
      worst_alpha = std::max(worst_alpha, e);
      alpha_moves = alpha_moves || !a[i].second->isZero(0.0);
    }
  }
  // The last layer only feeds the decision row, a text token with zero affinity,
  // so its alpha gradient vanishes; earlier layers must still see one.
  if (!alpha_moves) return {false, "every alpha gradient is identically zero"};
  return {worst <= 1e-4, fmt("%.0f groups, max rel err %.3g", static_cast<double>(a.size()), worst) + " (" +
                             worst_name + ")" + fmt(", alpha %.3g (tol 1e-4)", worst_alpha)};
}

// 3. Token-level affinity against the literal pairwise construction.
Outcome affinity_oracle() {
  Rng rng(3);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto sg = oracle::random_small_graph(rng);
    const auto g = oracle::to_topo_graph(sg);
    const auto d = pairwise_distances(g);
    PromptSequence p;
    const int L = 1 + static_cast<int>(rng.below(40));
    int rows = 0;
    for (int i = 0; i < L; ++i) {
      const bool visual = rng.uniform() < 0.6;
      p.tokens.push_back(visual ? vocab::kImage : vocab::kNode);
      p.sources.push_back(visual ? TokenSource::visual(NodeId{1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(sg.nodes)))})
                                 : TokenSource::text());
      p.visual_row.push_back(visual ? rows++ : -1);
    }
    p.visual_features = Eigen::MatrixXd::Zero(rows, 1);
    if (!(expand_affinity(d, p) == oracle::brute_affinity(d, p))) ++mismatches;
  }
  return {mismatches == 0, fmt("100 graphs/prompts, %.0f mismatches", mismatches)};
}

// 4. Distances and paths against exhaustive simple-path enumeration.
Outcome shortest_path_oracle() {
  Rng rng(4);
  int mismatches = 0, pairs = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto sg = oracle::random_small_graph(rng);
    const auto g = oracle::to_topo_graph(sg);
    const auto d = pairwise_distances(g);
    for (int a = 1; a <= sg.nodes; ++a) {
      for (int b = 1; b <= sg.nodes; ++b) {
        ++pairs;
        const auto [len, path] = oracle::brute_shortest(sg, a, b);
        std::vector<int> got;
        for (NodeId n : shortest_path(g, NodeId{a}, NodeId{b})) got.push_back(n.value);
        std::vector<NodeId> ids;
        for (int v : got) ids.push_back(NodeId{v});
        if (d(a - 1, b - 1) != len || got != path || path_length(g, ids) != len) ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt("100 graphs, %.0f node pairs, %.0f mismatches", pairs, mismatches)};
}

// 5. Handcrafted metric cases plus the ordering invariant.
Outcome metric_formulas() {
  std::vector<Eigen::Vector2d> pos = {{0, 0}, {2, 0}, {4, 0}};
  auto world = std::make_shared<const World>(make_world(std::move(pos), {{0, 1}, {1, 2}}, {0, 1, 2}, 1));
  const Episode ep = fixtures::episode_on(world, {0, 1, 2});
  const std::vector<int> gt = {0, 1, 2}, twice = {0, 1, 0, 1, 2}, pass_by = {0, 1, 2, 1};
  const auto oracle_case = score_walk(gt, true, ep);
  const auto half = score_walk(twice, true, ep);
  const auto split = score_walk(pass_by, false, ep);
  const std::vector<EpisodeRecord> two = {oracle_case, score_walk(std::vector<int>{0}, true, ep)};
  const auto agg = aggregate(two);
  const bool hand = oracle_case.spl == 1.0 && oracle_case.navigation_error == 0.0 && oracle_case.success &&
                    half.spl == 0.5 && half.success && split.oracle_success && !split.success && split.spl == 0.0 &&
                    agg.sr == 50.0 && agg.spl == 50.0;

  Rng rng(5);
  std::vector<EpisodeRecord> records;
  int violations = 0;
  std::vector<std::shared_ptr<const World>> worlds;
  for (std::uint64_t s = 0; s < 10; ++s) worlds.push_back(std::make_shared<const World>(generate_world(s, WorldConfig{})));
  while (records.size() < 1000) {
    const auto& w = worlds[rng.below(worlds.size())];
    const Episode e = generate_episode(w, rng.below(1u << 30));
    std::vector<int> walk = {e.start};
    const int len = static_cast<int>(rng.below(12));
    for (int k = 0; k < len; ++k) {
      const auto& nb = w->adjacency[walk.back()];
      walk.push_back(nb[rng.below(nb.size())].first);
    }
    const auto r = score_walk(walk, rng.uniform() < 0.7, e);
    if (r.spl > (r.success ? 1.0 : 0.0) || (r.success && !r.oracle_success)) ++violations;
    records.push_back(r);
  }
  const auto m = aggregate(records);
  const bool ordered = m.spl <= m.sr && m.sr <= m.osr && violations == 0;
  return {hand && ordered, std::string(hand ? "hand cases exact" : "hand cases WRONG") +
                               fmt(", 1000 records SPL %.2f <= SR %.2f <= OSR %.2f", m.spl, m.sr, m.osr)};
}

// 6. A forced wrong first move followed by a jump to a candidate of the start node.
Outcome backtracking() {
  const Episode ep = fixtures::episode_on(fixtures::spoke_world(), {0, 4, 6});
  ScriptedPolicy policy({1, 4, 6, -1});
  const auto traj = rollout(policy, ep, ObservationModel());
  if (traj.steps.size() != 4) return {false, "unexpected number of decisions"};
  const auto& s = traj.steps[1];
  const auto& snap = traj.snapshots[s.snapshot];
  const bool non_adjacent = !snap.edge_length(snap.current(), *s.decision.target).has_value();
  const bool through_start = s.traversed == std::vector<NodeId>{NodeId{2}, NodeId{1}, NodeId{5}};
  const bool geodesic = s.traversed_length == s.geodesic_at_decision && s.geodesic_at_decision == 6.0;
  bool walk = true;
  double total = 0.0;
  for (std::size_t i = 1; i < traj.vertices.size(); ++i) {
    const auto len = ep.world->edge_length(traj.vertices[i - 1], traj.vertices[i]);
    walk = walk && len.has_value();
    total += len.value_or(0.0);
  }
  walk = walk && total == traj.length && traj.vertices == std::vector<int>{0, 1, 0, 4, 6};
  const bool ok = non_adjacent && through_start && geodesic && walk && traj.stopped;
  return {ok, std::string("traversed [2,1,5] ") + (through_start ? "yes" : "no") + ", detour " +
                  fmt("%.2f m vs geodesic %.2f m", s.traversed_length, s.geodesic_at_decision) +
                  (walk ? ", valid walk" : ", INVALID walk")};
}

// 7. Eight fixed samples are memorised.
Outcome overfit() {
  const RunConfig cfg = load_run_config(kConfigDir + "overfit.txt");
  const Dataset ds = generate_dataset(kBenchmarkDataSeed, cfg.data);
  const auto all = prepare_samples(ds.train_samples, ds.instructions(), cfg.nav());
  const std::vector<PreparedSample> eight(all.begin(), all.begin() + 8);
  ModelConfig mc = cfg.model;
  mc.d_obs = ds.config.observation.d_obs;
  TrainState state = init_train_state(mc);
  TrainConfig tc = cfg.train;
  tc.steps = std::min(tc.steps, 2000);
  int first_below = -1;
  train_steps(state, eight, tc, [&](const TrainState&, int step, double loss) {
    if (first_below < 0 && loss < 0.05) first_below = step;
  });
  const double final_loss = mean_loss(state.model, eight);
  return {final_loss < 0.05, fmt("mean loss %.4f after %.0f steps (batch loss first < 0.05 at step %.0f)", final_loss,
                                 tc.steps, first_below)};
}

// 8. STAR-Att and the global action space each add at least 5 SR points.
Outcome ablation() {
  const RunConfig cfg = load_run_config(kConfigDir + "benchmark.txt");
  const Dataset ds = generate_dataset(kBenchmarkDataSeed, cfg.data);
  const std::vector<Variant> variants = {Variant::Full, Variant::NoStarAtt, Variant::LocalActions};
  const std::vector<std::uint64_t> seeds = {0, 1, 2};
  std::printf("  benchmark: %zu train episodes (%zu samples), %zu unseen episodes, %d steps per run\n", ds.train.size(),
              ds.train_samples.size(), ds.val.size(), cfg.train.steps);
  const auto result = run_sweep(ds, cfg, variants, seeds, [](const VariantRun& r) {
    std::printf("  %-14s seed %llu  SR %6.2f  SPL %6.2f  loss %.4f  (%.0f s)\n", to_string(r.variant).c_str(),
                static_cast<unsigned long long>(r.seed), r.report.sr, r.report.spl, r.final_loss, r.seconds);
    std::fflush(stdout);
  });
  const double full = result.mean_sr(Variant::Full);
  const double no_star = result.mean_sr(Variant::NoStarAtt);
  const double local = result.mean_sr(Variant::LocalActions);
  const bool ok = full - no_star >= 5.0 && full - local >= 5.0;
  return {ok, fmt("mean unseen SR full %.2f, no-star-att %.2f, local-actions %.2f", full, no_star, local) +
                  fmt(" (margins %+.2f / %+.2f, need >= 5)", full - no_star, full - local)};
}

// 9. Ground-truth replay is perfect and stopping immediately never succeeds far from the goal.
Outcome oracle_closure() {
  std::string detail;
  bool ok = true;
  for (const char* preset : {"benchmark.txt", "overfit.txt", "default.txt"}) {
    const RunConfig cfg = load_run_config(kConfigDir + preset);
    const Dataset ds = generate_dataset(kBenchmarkDataSeed, cfg.data);
    const ObservationModel observer(ds.config.observation);
    for (const auto* split : {&ds.train, &ds.val}) {
      OraclePolicy oracle;
      const auto best = evaluate_split(oracle, *split, observer, cfg.nav(), cfg.success_radius);
      std::vector<Episode> far;
      for (const auto& ep : *split) {
        if (ep.world->geodesic(ep.start, ep.goal) > 3.0) far.push_back(ep);
      }
      AlwaysStopPolicy stop;
      const double stop_sr = far.empty() ? 0.0 : evaluate_split(stop, far, observer, cfg.nav(), cfg.success_radius).sr;
      ok = ok && best.sr == 100.0 && best.spl == 100.0 && stop_sr == 0.0 && !far.empty();
      if (best.sr != 100.0 || best.spl != 100.0 || stop_sr != 0.0) {
        detail += std::string(preset) + fmt(" split failed: oracle SR %.2f SPL %.2f, stop SR %.2f; ", best.sr, best.spl, stop_sr);
      }
    }
  }
  return {ok, detail.empty() ? "oracle SR = SPL = 100 and always-stop SR = 0 on all 6 splits" : detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"zero-bias identity", zero_bias_identity},  {"gradient check", gradient_check},
      {"affinity oracle", affinity_oracle},        {"shortest-path oracle", shortest_path_oracle},
      {"metric formulas", metric_formulas},        {"backtracking scenario", backtracking},
      {"overfit sanity", overfit},                 {"directional ablation", ablation},
      {"oracle closure", oracle_closure},
  };
  const std::vector<double> budgets = {10, 120, 10, 30, 60, 10, 300, 2700, 120};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < budgets[i];
    if (!in_time) o.detail += fmt("; over the %.0f s budget", budgets[i]);
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("criterion %d (%s): %s  %s  [%.1f s]\n", id, criteria[i].first, pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
