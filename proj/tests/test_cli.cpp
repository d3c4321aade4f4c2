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

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "starnav/metrics.hpp"
#include "starnav/serialization.hpp"
#include "starnav/trajectory_dump.hpp"

using namespace starnav;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "starnav_cli_tests";

int run(const std::string& args) {
  const std::string cmd = std::string(STARNAV_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<json> read_jsonl(const fs::path& p) {
  std::vector<json> out;
  std::ifstream is(p);
  for (std::string line; std::getline(is, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const char* kSmall =
    "data.train_worlds = 4\n"
    "data.train_episodes_per_world = 3\n"
    "data.val_worlds = 3\n"
    "data.val_episodes_per_world = 3\n"
    "model.model_dim = 16\n"
    "model.num_heads = 2\n"
    "model.projector_hidden = 16\n"
    "train.steps = 20\n"
    "train.batch_size = 4\n"
    "train.eval_interval = 10\n";

// Small dataset and config shared by the tests below, created once.
struct Workspace {
  fs::path config = kRoot / "small.txt";
  fs::path data = kRoot / "data";
  fs::path trained = kRoot / "train_full";

  Workspace() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
    std::ofstream(config) << kSmall;
    REQUIRE(run("gen --seed 7 --config " + q(config) + " --out " + q(data)) == 0);
    REQUIRE(run("train --quiet --config " + q(config) + " --data " + q(data) + " --out " + q(trained)) == 0);
  }
};

const Workspace& workspace() {
  static const Workspace w;
  return w;
}

}  // namespace

TEST_CASE("gen writes a manifest that matches the config") {
  const fs::path out = kRoot / "gen_default";
  fs::remove_all(out);
  REQUIRE(run("gen --seed 7 --out " + q(out)) == 0);
  const json m = json::parse(slurp(out / "manifest.json"));
  CHECK(m["schema"] == kSchemaVersion);
  CHECK(m["seed"] == 7);
  CHECK(m["counts"]["train_episodes"] == 300);
  CHECK(m["counts"]["val_unseen_episodes"] == 200);
  CHECK(read_jsonl(out / "episodes.jsonl").size() == 500);
  CHECK(fs::exists(out / "config.txt"));

  std::set<std::uint64_t> train(m["train_world_seeds"].begin(), m["train_world_seeds"].end());
  for (const auto& s : m["val_world_seeds"]) CHECK(train.count(s.get<std::uint64_t>()) == 0);

  const fs::path again = kRoot / "gen_default_again";
  fs::remove_all(again);
  REQUIRE(run("gen --seed 7 --out " + q(again)) == 0);
  for (const char* f : {"manifest.json", "worlds.jsonl", "episodes.jsonl", "sap_train.jsonl", "sap_val.jsonl"}) {
    CHECK(slurp(out / f) == slurp(again / f));
  }
}

TEST_CASE("train writes the run log, checkpoints and resolved config") {
  const auto& w = workspace();
  CHECK(fs::exists(w.trained / "model.ckpt"));
  CHECK(fs::exists(w.trained / "checkpoints" / "step_000010.ckpt"));
  CHECK(fs::exists(w.trained / "config.txt"));
  const auto log = read_jsonl(w.trained / "run_log.jsonl");
  REQUIRE(log.size() >= 3);
  CHECK(log.front()["kind"] == "config");
  CHECK(log.front()["star_att"] == "on");
  int train_lines = 0, evals = 0;
  for (const auto& r : log) {
    train_lines += r["kind"] == "train";
    evals += r["kind"] == "eval";
  }
  CHECK(train_lines == 20);
  CHECK(evals == 1);
  CHECK(log.back()["kind"] == "final");
  CHECK(log.back()["metrics"]["episodes"] == 9);
}

TEST_CASE("train ablations show up in the debug dump") {
  const auto& w = workspace();
  SUBCASE("no-star-att") {
    const fs::path out = kRoot / "train_nostar";
    REQUIRE(run("train --quiet --ablate no-star-att --config " + q(w.config) + " --data " + q(w.data) + " --out " + q(out)) == 0);
    CHECK(read_jsonl(out / "run_log.jsonl").front()["star_att"] == "off");
    const auto dump = read_jsonl(out / "debug_dump.jsonl");
    REQUIRE(dump.size() == 3);
    for (const auto& r : dump) {
      CHECK(r["d_hat_max"] == 0.0);
      for (const auto& row : r["d_hat"]) {
        for (const auto& v : row) CHECK(v.get<double>() == 0.0);
      }
    }
    const auto full = read_jsonl(w.trained / "debug_dump.jsonl");
    bool any_positive = false;
    for (const auto& r : full) any_positive = any_positive || r["d_hat_max"].get<double>() > 0.0;
    CHECK(any_positive);
  }
  SUBCASE("no-inp") {
    const fs::path out = kRoot / "train_noinp";
    REQUIRE(run("train --quiet --ablate no-inp --config " + q(w.config) + " --data " + q(w.data) + " --out " + q(out)) == 0);
    for (const auto& r : read_jsonl(out / "debug_dump.jsonl")) {
      CHECK(r["layout"] == "flat");
      bool seen_visual = false;
      for (const auto& s : r["segments"]) {
        if (s["kind"] == "visual") seen_visual = true;
        if (seen_visual) CHECK(s["kind"] == "visual");
      }
      CHECK(seen_visual);
    }
  }
  SUBCASE("local-actions") {
    const fs::path out = kRoot / "train_local";
    REQUIRE(run("train --quiet --ablate local-actions --debug-samples 6 --config " + q(w.config) + " --data " + q(w.data) +
                " --out " + q(out)) == 0);
    CHECK(read_jsonl(out / "run_log.jsonl").front()["global_action"] == "off");
    for (const auto& r : read_jsonl(out / "debug_dump.jsonl")) {
      CHECK(r["scope"] == "local");
      std::set<int> adjacent;
      for (const auto& a : r["adjacent_to_current"]) adjacent.insert(a.get<int>());
      for (const auto& e : r["action_space"]) {
        if (!e["node"].is_null()) CHECK(adjacent.count(e["node"].get<int>()) == 1);
      }
    }
  }
  SUBCASE("unknown ablation") {
    CHECK(run("train --quiet --ablate no-such --data " + q(w.data) + " --out " + q(kRoot / "bad")) == 1);
  }
}

TEST_CASE("train rejects a config that disagrees with the dataset") {
  const auto& w = workspace();
  const fs::path cfg = kRoot / "mismatch.txt";
  std::ofstream(cfg) << kSmall << "obs.d_obs = 16\n";
  CHECK(run("train --quiet --config " + q(cfg) + " --data " + q(w.data) + " --out " + q(kRoot / "mm")) == 1);
  const fs::path unknown = kRoot / "unknown.txt";
  std::ofstream(unknown) << "train.momentum = 0.9\n";
  CHECK(run("train --quiet --config " + q(unknown) + " --data " + q(w.data) + " --out " + q(kRoot / "mm")) == 1);
  CHECK(run("config --config " + q(unknown)) == 1);
  CHECK(run("train --quiet --data " + q(kRoot / "no_such_dir") + " --out " + q(kRoot / "mm")) == 1);
}

TEST_CASE("eval is deterministic and its aggregate matches the episode records") {
  const auto& w = workspace();
  const fs::path a = kRoot / "eval_a", b = kRoot / "eval_b";
  const std::string ck = q(w.trained / "model.ckpt");
  REQUIRE(run("eval --checkpoint " + ck + " --data " + q(w.data) + " --out " + q(a)) == 0);
  REQUIRE(run("eval --checkpoint " + ck + " --data " + q(w.data) + " --out " + q(b)) == 0);
  CHECK(slurp(a / "episodes.jsonl") == slurp(b / "episodes.jsonl"));
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));

  const json report = json::parse(slurp(a / "report.json"));
  for (const char* k : {"schema", "episodes", "tl", "ne", "sr", "osr", "spl", "split", "checkpoint_step"}) {
    CHECK(report.contains(k));
  }
  CHECK(report["split"] == "val_unseen");
  CHECK(report["checkpoint_step"] == 20);
  std::vector<EpisodeRecord> records;
  for (const auto& r : read_jsonl(a / "episodes.jsonl")) records.push_back(episode_record_from_json(r));
  REQUIRE(records.size() == 9);
  const auto m = aggregate(records);
  CHECK(m.sr == doctest::Approx(report["sr"].get<double>()).epsilon(1e-12));
  CHECK(m.spl == doctest::Approx(report["spl"].get<double>()).epsilon(1e-12));
  CHECK(m.osr == doctest::Approx(report["osr"].get<double>()).epsilon(1e-12));
  CHECK(m.tl == doctest::Approx(report["tl"].get<double>()).epsilon(1e-12));
  CHECK(m.ne == doctest::Approx(report["ne"].get<double>()).epsilon(1e-12));
  CHECK(fs::exists(a / "config.txt"));
}

TEST_CASE("eval rejects an incompatible checkpoint") {
  const auto& w = workspace();
  const fs::path cfg = kRoot / "wide.txt", data = kRoot / "data_wide";
  std::ofstream(cfg) << kSmall << "obs.d_obs = 16\n";
  REQUIRE(run("gen --seed 8 --config " + q(cfg) + " --out " + q(data)) == 0);
  CHECK(run("eval --checkpoint " + q(w.trained / "model.ckpt") + " --data " + q(data) + " --out " + q(kRoot / "ev")) == 1);
  CHECK(run("eval --checkpoint " + q(w.data / "manifest.json") + " --data " + q(w.data) + " --out " + q(kRoot / "ev")) == 1);
}

TEST_CASE("rollout dumps") {
  const auto& w = workspace();
  std::vector<int> ids;
  for (const auto& e : read_jsonl(w.data / "episodes.jsonl")) ids.push_back(e["id"].get<int>());
  REQUIRE_FALSE(ids.empty());

  SUBCASE("model policy dump round-trips") {
    const fs::path dump = kRoot / "model_dump.json";
    REQUIRE(run("rollout --checkpoint " + q(w.trained / "model.ckpt") + " --data " + q(w.data) + " --episode " +
                std::to_string(ids.back()) + " --dump " + q(dump)) == 0);
    const json j = json::parse(slurp(dump));
    CHECK(to_json(trajectory_dump_from_json(j)) == j);
    CHECK(j["policy"] == "model");
  }
  SUBCASE("a stop decision ends the dump") {
    const fs::path dump = kRoot / "stop_dump.json";
    REQUIRE(run("rollout --policy stop --data " + q(w.data) + " --episode " + std::to_string(ids.front()) + " --dump " +
                q(dump)) == 0);
    const auto d = trajectory_dump_from_json(json::parse(slurp(dump)));
    REQUIRE(d.steps.size() == 1);
    CHECK(d.steps[0].decision.is_stop());
    CHECK(d.stopped);
    CHECK(d.walk.size() == 1);
  }
  SUBCASE("some exploring episode backtracks through the map") {
    bool found = false;
    for (int id : ids) {
      const fs::path dump = kRoot / "random_dump.json";
      REQUIRE(run("rollout --policy random --data " + q(w.data) + " --episode " + std::to_string(id) + " --dump " + q(dump)) == 0);
      const auto d = trajectory_dump_from_json(json::parse(slurp(dump)));
      for (const auto& s : d.steps) {
        if (s.decision.is_stop() || s.traversed.size() <= 2) continue;
        const auto& snap = d.snapshots[s.snapshot];
        CHECK_FALSE(snap.edge_length(snap.current(), *s.decision.target).has_value());
        CHECK(s.traversed.back() == *s.decision.target);
        CHECK(s.traversed_length == doctest::Approx(s.geodesic_at_decision).epsilon(1e-12));
        found = true;
      }
      if (found) break;
    }
    CHECK(found);
  }
  SUBCASE("unknown episode") {
    CHECK(run("rollout --policy oracle --data " + q(w.data) + " --episode 99999") == 1);
  }
  SUBCASE("missing checkpoint for the model policy") {
    CHECK(run("rollout --data " + q(w.data) + " --episode " + std::to_string(ids.front())) == 1);
  }
}

TEST_CASE("command-line errors exit with status 1") {
  CHECK(run("") == 1);
  CHECK(run("gen --out " + q(kRoot / "x")) == 1);
  CHECK(run("frobnicate") == 1);
}
