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

#include "starnav/error.hpp"

namespace starnav {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMove: return "InvalidMove";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::ConnectivityViolation: return "ConnectivityViolation";
    case ErrorCode::GenerationFailure: return "GenerationFailure";
    case ErrorCode::IncompletePrompt: return "IncompletePrompt";
    case ErrorCode::InconsistentState: return "InconsistentState";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::NumericError: return "NumericError";
    case ErrorCode::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::InvalidTrajectory: return "InvalidTrajectory";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Divergence: return "Divergence";
  }
  return "Unknown";
}

}  // namespace starnav
