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

#include "starnav/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "starnav/error.hpp"

namespace starnav {

namespace {

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  auto fail = [&] { throw Error(ErrorCode::ConfigError, "bad value '" + text + "' for " + key); };
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "on" || text == "1") return true;
    if (text == "false" || text == "off" || text == "0") return false;
    fail();
  } else if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) fail();
      return static_cast<T>(v);
    } catch (const std::logic_error&) {
      fail();
    }
  } else {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail();
    return v;
  }
  return T{};
}

template <class T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(v));
    return buf;
  } else {
    return std::to_string(v);
  }
}

template <class Access>
Field field(std::string key, Access access) {
  using T = std::remove_reference_t<decltype(access(std::declval<RunConfig&>()))>;
  return Field{key,
               [key, access](RunConfig& c, const std::string& text) { access(c) = parse_value<T>(key, text); },
               [access](const RunConfig& c) { return format_value(access(const_cast<RunConfig&>(c))); }};
}

#define STARNAV_FIELD(key, member) field(key, [](RunConfig& c) -> auto& { return c.member; })

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      STARNAV_FIELD("world.num_nodes", data.world.num_nodes),
      STARNAV_FIELD("world.box_size", data.world.box_size),
      STARNAV_FIELD("world.num_landmarks", data.world.num_landmarks),
      STARNAV_FIELD("world.min_separation", data.world.min_separation),
      STARNAV_FIELD("world.target_degree", data.world.target_degree),
      STARNAV_FIELD("world.max_attempts", data.world.max_attempts),
      STARNAV_FIELD("episode.min_path_nodes", data.episode.min_path_nodes),
      STARNAV_FIELD("episode.max_path_nodes", data.episode.max_path_nodes),
      STARNAV_FIELD("episode.max_attempts", data.episode.max_attempts),
      STARNAV_FIELD("obs.d_obs", data.observation.d_obs),
      STARNAV_FIELD("obs.panorama_tokens", data.observation.panorama_tokens),
      STARNAV_FIELD("obs.view_tokens", data.observation.view_tokens),
      STARNAV_FIELD("obs.max_views", data.observation.max_views),
      STARNAV_FIELD("obs.bearing_bins", data.observation.bearing_bins),
      STARNAV_FIELD("obs.noise_std", data.observation.noise_std),
      STARNAV_FIELD("obs.encoder_seed", data.observation.encoder_seed),
      STARNAV_FIELD("data.train_worlds", data.train_worlds),
      STARNAV_FIELD("data.train_episodes_per_world", data.train_episodes_per_world),
      STARNAV_FIELD("data.val_worlds", data.val_worlds),
      STARNAV_FIELD("data.val_episodes_per_world", data.val_episodes_per_world),
      STARNAV_FIELD("model.vocab_size", model.vocab_size),
      STARNAV_FIELD("model.model_dim", model.model_dim),
      STARNAV_FIELD("model.num_heads", model.num_heads),
      STARNAV_FIELD("model.num_layers", model.num_layers),
      STARNAV_FIELD("model.ffn_mult", model.ffn_mult),
      STARNAV_FIELD("model.projector_hidden", model.projector_hidden),
      STARNAV_FIELD("model.causal", model.causal),
      STARNAV_FIELD("model.positional", model.positional),
      STARNAV_FIELD("model.seed", model.seed),
      STARNAV_FIELD("train.learning_rate", train.learning_rate),
      STARNAV_FIELD("train.batch_size", train.batch_size),
      STARNAV_FIELD("train.steps", train.steps),
      STARNAV_FIELD("train.seed", train.seed),
      STARNAV_FIELD("train.star_att", train.star_att),
      STARNAV_FIELD("train.inp", train.inp),
      STARNAV_FIELD("train.global_action", train.global_action),
      STARNAV_FIELD("train.eval_interval", train.eval_interval),
      STARNAV_FIELD("train.beta1", train.beta1),
      STARNAV_FIELD("train.beta2", train.beta2),
      STARNAV_FIELD("train.epsilon", train.epsilon),
      STARNAV_FIELD("train.grad_clip", train.grad_clip),
      STARNAV_FIELD("eval.max_steps", max_steps),
      STARNAV_FIELD("eval.success_radius", success_radius),
  };
  return table;
}

#undef STARNAV_FIELD

}  // namespace

void RunConfig::validate() const {
  data.validate();
  ModelConfig m = model;
  m.d_obs = data.observation.d_obs;
  m.validate();
  train.validate();
  if (max_steps < 1) throw Error(ErrorCode::ConfigError, "eval.max_steps must be at least 1");
  if (!(success_radius > 0.0)) throw Error(ErrorCode::ConfigError, "eval.success_radius must be positive");
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->set(base, value);
  }
  base.model.d_obs = base.data.observation.d_obs;
  base.validate();
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_text(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

std::vector<std::string> run_config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

}  // namespace starnav
