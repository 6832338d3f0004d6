// Copyright 2026 The qtmlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtmlab/error.hpp"

#include <utility>

namespace qtmlab {
namespace {

std::string Compose(const std::string& stage, const std::string& message) {
  if (stage.empty()) return message;
  return "[" + stage + "] " + message;
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid-argument";
    case ErrorCode::kDegenerateInstance:
      return "degenerate-instance";
    case ErrorCode::kSolverFailure:
      return "solver-failure";
    case ErrorCode::kParse:
      return "parse-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::string stage)
    : std::runtime_error(Compose(stage, message)),
      code_(code),
      stage_(std::move(stage)),
      raw_message_(message) {}

Error Error::WithStage(std::string stage) const {
  return Error(code_, raw_message_, std::move(stage));
}

void ThrowInvalid(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace qtmlab
