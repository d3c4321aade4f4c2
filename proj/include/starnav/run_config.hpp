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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "starnav/dataset.hpp"
#include "starnav/star_transformer.hpp"
#include "starnav/trainer.hpp"

namespace starnav {

/// Everything a CLI run needs. Text form is one `section.key = value` per
/// line, `#` starts a comment, and every key is optional.
struct RunConfig {
  DatasetConfig data;
  ModelConfig model;
  TrainConfig train;
  int max_steps = 15;
  double success_radius = 3.0;

  NavConfig nav() const { return train.nav(max_steps); }
  void validate() const;
};

/// Unknown keys and malformed values are ConfigErrors.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Every key with its resolved value, parseable by parse_run_config.
std::string to_text(const RunConfig& config);

std::vector<std::string> run_config_keys();

}  // namespace starnav
