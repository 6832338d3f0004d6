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

#ifndef QTMLAB_ERROR_HPP_
#define QTMLAB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qtmlab {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateInstance,
  kSolverFailure,
  kParse,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library. The stage tag names the pipeline step
// that failed ("solve", "aggregation", "decision", ...) and may be empty.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string stage = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  // Copy of this error with a stage tag prepended to the message.
  Error WithStage(std::string stage) const;

 private:
  ErrorCode code_;
  std::string stage_;
  std::string raw_message_;
};

[[noreturn]] void ThrowInvalid(const std::string& message);

}  // namespace qtmlab

#endif  // QTMLAB_ERROR_HPP_
