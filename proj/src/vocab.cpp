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

#include "starnav/vocab.hpp"

#include <array>
#include <string_view>

namespace starnav::vocab {

namespace {

constexpr std::array<std::string_view, 17> kStructural = {
    "<pad>",     "<sys_role>",  "<sys_task>", "<sys_context>", "<sys_rules>", "<instr>",
    "<go>",      "<then>",      "<stop_at>",  "<node>",        "<current>",   "<visited>",
    "<candidate>", "<action>",  "<actions>",  "<decide>",      "<img>"};

}  // namespace

std::string token_name(int token) {
  if (token >= 0 && token < static_cast<int>(kStructural.size())) return std::string(kStructural[token]);
  if (token >= kDigitBase && token < kDigitBase + 10) return std::to_string(token - kDigitBase);
  if (token >= kLandmarkBase && token < kLandmarkBase + kMaxLandmarks) return "lm" + std::to_string(token - kLandmarkBase);
  if (token == kStop) return "<stop>";
  if (is_action(token)) return "a" + std::to_string(action_index(token));
  return "<unk" + std::to_string(token) + ">";
}

std::optional<int> parse_token(const std::string& name) {
  for (std::size_t i = 0; i < kStructural.size(); ++i) {
    if (name == kStructural[i]) return static_cast<int>(i);
  }
  if (name == "<stop>") return kStop;
  try {
    if (name.size() == 1 && name[0] >= '0' && name[0] <= '9') return kDigitBase + (name[0] - '0');
    if (name.rfind("lm", 0) == 0) {
      const int id = std::stoi(name.substr(2));
      if (id >= 0 && id < kMaxLandmarks) return landmark(id);
    }
    if (name.size() > 1 && name[0] == 'a') {
      const int id = std::stoi(name.substr(1));
      if (id >= 1 && id <= kMaxActions) return action(id);
    }
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

}  // namespace starnav::vocab
