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

#ifndef QTMLAB_SERIALIZE_HPP_
#define QTMLAB_SERIALIZE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qtmlab/analysis.hpp"
#include "qtmlab/equilibrium.hpp"
#include "qtmlab/squap.hpp"
#include "qtmlab/stats.hpp"
#include "qtmlab/synthetic.hpp"
#include "qtmlab/types.hpp"

namespace qtmlab {

// Version stamped into every JSON document and CSV header.
inline constexpr int kSchemaVersion = 1;

// printf-style %.17g, enough digits to round-trip any double.
std::string FormatReal(double x);

// {"n": .., "m": .., "values": [[..], ..], "B": [..], "c": ..}; B and c are
// optional. Values are agents outer.
struct Instance {
  ValueProfile values;
  std::optional<Vector> external;
  std::optional<double> c;
};

// Throws Error(kParse) naming the byte offset for malformed JSON, and
// kInvalidArgument for well-formed documents with bad content.
Instance ParseInstance(std::string_view json);
Instance LoadInstance(const std::string& path);
std::string InstanceJson(const Instance& instance);

std::string CertificateJson(const EquilibriumSolution& eq,
                            const MechanismParams& params,
                            const InstanceStats& stats, std::uint64_t seed,
                            bool certified);

std::string CommitmentJson(const SyntheticCommitment& commitment,
                           const MechanismParams& params);

// Pretty-printed by default; `compact` gives a single line for JSON-lines batches.
std::string SquapRunJson(const SquapRun& run, bool compact = false);

// One JSON object per line: {"t", "bhat", "payoffs", "k", "bstar"}.
std::string TranscriptJsonl(const SquapRun& run);

// "# qtmlab-csv schema=<v> kind=<kind>" followed by the column line.
std::string CsvHeader(std::string_view kind, const std::vector<std::string>& columns);

// Rows of (instance, bound, value, measured, margin, sense, certified).
std::string BoundCsv(
    const std::vector<std::pair<std::string, std::vector<BoundReport>>>& reports);

std::string ReadFile(const std::string& path);
// Writes atomically enough for a CLI: truncates and writes in one go.
void WriteFile(const std::string& path, std::string_view content);

}  // namespace qtmlab

#endif  // QTMLAB_SERIALIZE_HPP_
