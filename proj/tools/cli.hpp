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

#ifndef QTMLAB_TOOLS_CLI_HPP_
#define QTMLAB_TOOLS_CLI_HPP_

#include <ostream>

namespace qtmlab::cli {

// Process exit codes.
inline constexpr int kExitCertified = 0;
inline constexpr int kExitUncertified = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;

// Entry point of the qtmlab tool. Subcommands: generate, solve, sweep, squap.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qtmlab::cli

#endif  // QTMLAB_TOOLS_CLI_HPP_
