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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "starnav/benchmark.hpp"
#include "starnav/checkpoint.hpp"
#include "starnav/dataset.hpp"
#include "starnav/error.hpp"
#include "starnav/prompt.hpp"
#include "starnav/run_config.hpp"
#include "starnav/serialization.hpp"
#include "starnav/trainer.hpp"
#include "starnav/trajectory_dump.hpp"
#include "starnav/vocab.hpp"

namespace fs = std::filesystem;
using namespace starnav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create output directory " + dir.string());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return os;
}

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

RunConfig config_or_default(const std::string& path) { return path.empty() ? RunConfig{} : load_run_config(path); }

/// Adopts the dataset's generation settings, rejecting a config that disagrees with them.
RunConfig reconcile(RunConfig config, const Dataset& dataset, bool explicit_config) {
  RunConfig from_data = config;
  from_data.data = dataset.config;
  from_data.model.d_obs = dataset.config.observation.d_obs;
  if (explicit_config) {
    std::istringstream a(to_text(config)), b(to_text(from_data));
    std::string la, lb;
    while (std::getline(a, la) && std::getline(b, lb)) {
      const bool data_key = la.rfind("world.", 0) == 0 || la.rfind("episode.", 0) == 0 || la.rfind("obs.", 0) == 0 ||
                            la.rfind("data.", 0) == 0;
      if (data_key && la != lb) throw Error(ErrorCode::ConfigError, "config does not match the dataset: " + la + " vs " + lb);
    }
  }
  return from_data;
}

json debug_record(const SapSample& sample, const Episode& episode, const NavConfig& nav) {
  const ActionSpace space = build_action_space(sample.graph, nav.scope);
  const auto [prompt, affinity] = prepare_inputs(episode, sample.graph, sample.observations, space, nav);
  std::istringstream rendered(render_prompt(prompt));
  std::vector<std::string> lines;
  for (std::string line; std::getline(rendered, line);) lines.push_back(line);
  json adjacent = json::array();
  for (const auto& [id, len] : sample.graph.adjacent(sample.graph.current())) adjacent.push_back(id.value);
  json rows = json::array();
  for (Eigen::Index r = 0; r < affinity.rows(); ++r) {
    std::vector<double> row(affinity.cols());
    for (Eigen::Index c = 0; c < affinity.cols(); ++c) row[c] = affinity(r, c);
    rows.push_back(row);
  }
  json segments = json::array();
  for (const auto& s : prompt.segments) {
    segments.push_back({{"kind", s.kind == PromptSegment::Kind::Visual ? "visual" : "text"},
                        {"begin", s.begin},
                        {"end", s.end},
                        {"label", s.label}});
  }
  return {{"schema", kSchemaVersion},
          {"episode_id", sample.episode_id},
          {"step", sample.step},
          {"star_att", nav.star_att},
          {"layout", nav.layout == PromptLayout::Interleaved ? "interleaved" : "flat"},
          {"scope", nav.scope == ActionScope::Global ? "global" : "local"},
          {"current", sample.graph.current().value},
          {"adjacent_to_current", adjacent},
          {"action_space", to_json(space)},
          {"prompt", lines},
          {"segments", segments},
          {"d_hat_max", affinity.size() ? affinity.maxCoeff() : 0.0},
          {"d_hat", rows}};
}

std::vector<Episode>& split_of(Dataset& ds, const std::string& name) {
  if (name == "val" || name == "val_unseen") return ds.val;
  if (name == "train") return ds.train;
  throw Error(ErrorCode::ConfigError, "unknown split '" + name + "' (expected train or val)");
}

RunConfig config_from_checkpoint(const Checkpoint& ckpt, const Dataset& dataset) {
  RunConfig c;
  c.data = dataset.config;
  c.model = ckpt.state.model.config;
  c.train = ckpt.train_config;
  return c;
}

Checkpoint load_compatible(const std::string& path, const Dataset& dataset) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.state.model.config.d_obs != dataset.config.observation.d_obs) {
    throw Error(ErrorCode::ConfigError, "incompatible checkpoint: model expects d_obs " +
                                            std::to_string(ckpt.state.model.config.d_obs) + ", dataset has " +
                                            std::to_string(dataset.config.observation.d_obs));
  }
  return ckpt;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::uint64_t seed = 0;
  std::string config, out;
};

void cmd_gen(const GenArgs& a) {
  RunConfig config = config_or_default(a.config);
  const Dataset ds = generate_dataset(a.seed, config.data);
  write_dataset(ds, a.out);
  write_text(fs::path(a.out) / "config.txt", to_text(config));
  std::printf("wrote %zu train / %zu val_unseen episodes (%zu / %zu SAP samples) to %s\n", ds.train.size(), ds.val.size(),
              ds.train_samples.size(), ds.val_samples.size(), a.out.c_str());
}

struct TrainArgs {
  std::string config, data, out, resume;
  std::vector<std::string> ablate;
  int debug_samples = 3;
  bool quiet = false;
};

void cmd_train(const TrainArgs& a) {
  RunConfig config = config_or_default(a.config);
  for (const auto& name : a.ablate) {
    const auto v = parse_variant(name);
    if (!v || *v == Variant::Full) throw Error(ErrorCode::ConfigError, "unknown ablation '" + name + "'");
    config.train = apply_variant(config.train, *v);
  }
  const Dataset ds = load_dataset(a.data);
  config = reconcile(config, ds, !a.config.empty());
  config.validate();
  const fs::path out(a.out);
  ensure_dir(out);
  ensure_dir(out / "checkpoints");
  write_text(out / "config.txt", to_text(config));

  const NavConfig nav = config.nav();
  std::ofstream debug = open_out(out / "debug_dump.jsonl");
  for (int i = 0; i < a.debug_samples && i < static_cast<int>(ds.train_samples.size()); ++i) {
    // Spread the sampled records over the training set.
    const std::size_t idx = ds.train_samples.size() * static_cast<std::size_t>(i) / static_cast<std::size_t>(a.debug_samples);
    const auto& sample = ds.train_samples[idx];
    debug << debug_record(sample, *ds.find_episode(sample.episode_id), nav).dump() << '\n';
  }

  const auto prepared = prepare_samples(ds.train_samples, ds.instructions(), nav);
  TrainState state = init_train_state(config.model);
  if (!a.resume.empty()) {
    Checkpoint ckpt = load_checkpoint(a.resume, config.model);
    if (!(ckpt.train_config == config.train)) throw Error(ErrorCode::ConfigError, "resume checkpoint was trained with a different config");
    state = std::move(ckpt.state);
  }

  std::ofstream log = open_out(out / "run_log.jsonl");
  log << json{{"schema", kSchemaVersion},
              {"kind", "config"},
              {"star_att", config.train.star_att ? "on" : "off"},
              {"inp", config.train.inp ? "on" : "off"},
              {"global_action", config.train.global_action ? "on" : "off"},
              {"model", to_json(config.model)},
              {"train", to_json(config.train)},
              {"train_samples", prepared.size()},
              {"val_episodes", ds.val.size()}}
             .dump()
      << '\n';
  const ObservationModel observer(ds.config.observation);
  const int report_every = std::max(1, config.train.steps / 20);
  train_steps(state, prepared, config.train, [&](const TrainState& s, int step, double loss) {
    log << json{{"kind", "train"}, {"step", step}, {"loss", loss}}.dump() << '\n';
    if (!a.quiet && step % report_every == 0) std::printf("step %6d  loss %.4f\n", step, loss);
    if (config.train.eval_interval > 0 && step % config.train.eval_interval == 0 && step < config.train.steps) {
      char name[64];
      std::snprintf(name, sizeof name, "step_%06d.ckpt", step);
      save_checkpoint(out / "checkpoints" / name, s, config.train);
      const auto report = evaluate_split(s.model, ds.val, observer, nav, config.success_radius);
      log << json{{"kind", "eval"}, {"step", step}, {"split", "val_unseen"}, {"metrics", to_json(report)}}.dump() << '\n';
      log.flush();
    }
  });
  save_checkpoint(out / "model.ckpt", state, config.train);
  const auto report = evaluate_split(state.model, ds.val, observer, nav, config.success_radius);
  log << json{{"kind", "final"}, {"step", state.step}, {"split", "val_unseen"}, {"metrics", to_json(report)}}.dump() << '\n';
  std::printf("%s", format_report(report).c_str());
}

struct EvalArgs {
  std::string checkpoint, data, out, split = "val";
  int max_steps = 0;
};

void cmd_eval(const EvalArgs& a) {
  Dataset ds = load_dataset(a.data);
  const Checkpoint ckpt = load_compatible(a.checkpoint, ds);
  RunConfig config = config_from_checkpoint(ckpt, ds);
  if (a.max_steps > 0) config.max_steps = a.max_steps;
  config.validate();
  const auto& episodes = split_of(ds, a.split);
  const ObservationModel observer(ds.config.observation);
  ModelPolicy<float> policy(ckpt.state.model);
  std::vector<EpisodeRecord> records;
  for (const auto& ep : episodes) {
    records.push_back(score_episode(rollout(policy, ep, observer, config.nav()), ep, config.success_radius));
  }
  const MetricsReport report = aggregate(records);
  const fs::path out(a.out);
  ensure_dir(out);
  write_text(out / "config.txt", to_text(config));
  std::ofstream eps = open_out(out / "episodes.jsonl");
  for (const auto& r : records) eps << to_json(r).dump() << '\n';
  json rj = to_json(report);
  rj["split"] = a.split == "train" ? "train" : "val_unseen";
  rj["checkpoint_step"] = ckpt.state.step;
  write_text(out / "report.json", rj.dump(2) + "\n");
  write_text(out / "report.txt", format_report(report));
  std::printf("%s", format_report(report).c_str());
}

struct RolloutArgs {
  std::string checkpoint, data, dump, policy = "model";
  int episode = -1;
  int max_steps = 0;
};

void cmd_rollout(const RolloutArgs& a) {
  const Dataset ds = load_dataset(a.data);
  const Episode* ep = ds.find_episode(a.episode);
  if (!ep) throw Error(ErrorCode::ConfigError, "unknown episode " + std::to_string(a.episode));
  RunConfig config;
  config.data = ds.config;
  std::optional<Checkpoint> ckpt;
  std::unique_ptr<Policy> policy;
  if (a.policy == "model") {
    if (a.checkpoint.empty()) throw Error(ErrorCode::ConfigError, "--checkpoint is required for the model policy");
    ckpt = load_compatible(a.checkpoint, ds);
    config = config_from_checkpoint(*ckpt, ds);
    policy = std::make_unique<ModelPolicy<float>>(ckpt->state.model);
  } else if (a.policy == "oracle") {
    policy = std::make_unique<OraclePolicy>();
  } else if (a.policy == "stop") {
    policy = std::make_unique<AlwaysStopPolicy>();
  } else if (a.policy == "random") {
    policy = std::make_unique<RandomPolicy>(mix_seed({ep->seed, 0x7a9d}));
  } else {
    throw Error(ErrorCode::ConfigError, "unknown policy '" + a.policy + "'");
  }
  if (a.max_steps > 0) config.max_steps = a.max_steps;
  const ObservationModel observer(ds.config.observation);
  const TrajectoryDump dump = record_rollout(*policy, a.policy, *ep, observer, config.nav(), config.success_radius);

  std::printf("episode %d  world %d  start %d  goal %d\ninstruction:", ep->id, ep->world_id, ep->start, ep->goal);
  for (int t : ep->instruction) std::printf(" %s", vocab::token_name(t).c_str());
  std::printf("\n");
  for (const auto& s : dump.steps) {
    const TopoGraph& g = dump.snapshots[s.snapshot];
    std::printf("-- step %d  at node %d (map has %d nodes)\n", s.step, g.current().value, g.size());
    for (std::size_t i = 0; i < s.action_space.entries.size(); ++i) {
      const auto& e = s.action_space.entries[i];
      std::printf("   %-6s %-9s", vocab::token_name(e.token).c_str(), e.node ? ("node " + std::to_string(e.node->value)).c_str() : "stop");
      if (i < s.decision.action_logits.size()) std::printf(" logit %8.3f", s.decision.action_logits[i]);
      std::printf("\n");
    }
    if (s.decision.is_stop()) {
      std::printf("   decision: stop\n");
    } else {
      std::printf("   decision: move to node %d via", s.decision.target->value);
      for (NodeId n : s.traversed) std::printf(" %d", n.value);
      std::printf(" (%.2f m)\n", s.traversed_length);
    }
  }
  std::printf("result: %s  TL %.2f  NE %.2f  SPL %.3f\n", dump.record.success ? "success" : "failure",
              dump.record.trajectory_length, dump.record.navigation_error, dump.record.spl);
  if (!a.dump.empty()) write_text(a.dump, to_json(dump).dump(1) + "\n");
}

struct SweepArgs {
  std::string config, data, out;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::vector<std::string> variants{"full", "no-star-att", "local-actions"};
};

void cmd_sweep(const SweepArgs& a) {
  RunConfig config = config_or_default(a.config);
  const Dataset ds = load_dataset(a.data);
  config = reconcile(config, ds, !a.config.empty());
  config.validate();
  std::vector<Variant> variants;
  for (const auto& name : a.variants) {
    const auto v = parse_variant(name);
    if (!v) throw Error(ErrorCode::ConfigError, "unknown variant '" + name + "'");
    variants.push_back(*v);
  }
  const fs::path out(a.out);
  ensure_dir(out);
  write_text(out / "config.txt", to_text(config));
  std::ofstream runs = open_out(out / "runs.jsonl");
  const SweepResult result = run_sweep(ds, config, variants, a.seeds, [&](const VariantRun& r) {
    std::printf("%-14s seed %llu  SR %6.2f  SPL %6.2f  (%.0f s)\n", to_string(r.variant).c_str(),
                static_cast<unsigned long long>(r.seed), r.report.sr, r.report.spl, r.seconds);
    std::fflush(stdout);
    runs << json{{"schema", kSchemaVersion},
                 {"variant", to_string(r.variant)},
                 {"seed", r.seed},
                 {"final_loss", r.final_loss},
                 {"seconds", r.seconds},
                 {"metrics", to_json(r.report)}}
                .dump()
         << '\n';
  });
  write_text(out / "summary.txt", format_sweep(result));
  std::printf("%s", format_sweep(result).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology-aware navigation agent on synthetic graph worlds"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate worlds, episodes and the SAP dataset");
  g->add_option("--seed", gen.seed, "Dataset seed")->required();
  g->add_option("--config", gen.config, "Run config file (key = value)");
  g->add_option("--out", gen.out, "Output directory")->required();

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train with teacher forcing and evaluate on the held-out split");
  t->add_option("--config", train.config, "Run config file");
  t->add_option("--data", train.data, "Dataset directory")->required();
  t->add_option("--out", train.out, "Output directory")->required();
  t->add_option("--ablate", train.ablate, "Switch off a component: no-star-att, no-inp, local-actions");
  t->add_option("--debug-samples", train.debug_samples, "Training samples written to debug_dump.jsonl");
  t->add_option("--resume", train.resume, "Continue from a checkpoint");
  t->add_flag("--quiet", train.quiet, "No progress output");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  e->add_option("--checkpoint", eval.checkpoint, "Checkpoint file")->required();
  e->add_option("--data", eval.data, "Dataset directory")->required();
  e->add_option("--out", eval.out, "Output directory")->required();
  e->add_option("--split", eval.split, "train or val");
  e->add_option("--max-steps", eval.max_steps, "Override the decision budget");

  RolloutArgs roll;
  auto* r = app.add_subcommand("rollout", "Run one episode and print every decision");
  r->add_option("--checkpoint", roll.checkpoint, "Checkpoint file (model policy)");
  r->add_option("--data", roll.data, "Dataset directory")->required();
  r->add_option("--episode", roll.episode, "Episode id")->required();
  r->add_option("--dump", roll.dump, "Write the trajectory dump (JSON) here");
  r->add_option("--policy", roll.policy, "model, oracle, stop or random");
  r->add_option("--max-steps", roll.max_steps, "Override the decision budget");

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "Train and evaluate ablation variants over several seeds");
  s->add_option("--config", sweep.config, "Run config file");
  s->add_option("--data", sweep.data, "Dataset directory")->required();
  s->add_option("--out", sweep.out, "Output directory")->required();
  s->add_option("--seeds", sweep.seeds, "Seeds")->delimiter(',');
  s->add_option("--variants", sweep.variants, "full, no-star-att, no-inp, local-actions")->delimiter(',');

  std::string config_path;
  auto* c = app.add_subcommand("config", "Print the resolved config");
  c->add_option("--config", config_path, "Run config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitUser;
  }

  try {
    if (*g) cmd_gen(gen);
    if (*t) cmd_train(train);
    if (*e) cmd_eval(eval);
    if (*r) cmd_rollout(roll);
    if (*s) cmd_sweep(sweep);
    if (*c) std::printf("%s", to_text(config_or_default(config_path)).c_str());
  } catch (const Error& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return ex.is_internal() ? kExitInternal : kExitUser;
  } catch (const json::exception& ex) {
    std::fprintf(stderr, "error: malformed input file: %s\n", ex.what());
    return kExitUser;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "internal error: %s\n", ex.what());
    return kExitInternal;
  }
  return kExitOk;
}
