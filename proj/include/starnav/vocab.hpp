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

#include <optional>
#include <string>

namespace starnav {

/// Closed synthetic vocabulary. Ids are fixed so datasets and checkpoints stay
/// comparable across runs.
namespace vocab {

inline constexpr int kPad = 0;
inline constexpr int kSysRole = 1;
inline constexpr int kSysTask = 2;
inline constexpr int kSysContext = 3;
inline constexpr int kSysRules = 4;
inline constexpr int kInstr = 5;
inline constexpr int kGo = 6;
inline constexpr int kThen = 7;
inline constexpr int kStopAt = 8;
inline constexpr int kNode = 9;
inline constexpr int kCurrent = 10;
inline constexpr int kVisited = 11;
inline constexpr int kCandidate = 12;
inline constexpr int kAction = 13;
inline constexpr int kActions = 14;
inline constexpr int kDecide = 15;
inline constexpr int kImage = 16;  // placeholder id carried by visual slots

inline constexpr int kDigitBase = 20;
inline constexpr int kLandmarkBase = 32;
inline constexpr int kMaxLandmarks = 64;
inline constexpr int kStop = 128;  // action index 0
inline constexpr int kActionBase = 128;
inline constexpr int kMaxActions = 63;  // candidate indices 1..63

inline constexpr int kMinVocabSize = kActionBase + kMaxActions + 1;
inline constexpr int kDefaultSize = 256;

constexpr int digit(int d) { return kDigitBase + d; }
constexpr int landmark(int id) { return kLandmarkBase + id; }
/// Token for action index `i`; index 0 is Stop.
constexpr int action(int i) { return kActionBase + i; }

constexpr bool is_action(int token) { return token >= kActionBase && token <= kActionBase + kMaxActions; }
constexpr int action_index(int token) { return token - kActionBase; }

std::string token_name(int token);
std::optional<int> parse_token(const std::string& name);

}  // namespace vocab
}  // namespace starnav
