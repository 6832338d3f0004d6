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

#ifndef QTMLAB_GENERATOR_HPP_
#define QTMLAB_GENERATOR_HPP_

#include <cstdint>
#include <random>
#include <string_view>

#include "qtmlab/types.hpp"

namespace qtmlab {

using Rng = std::mt19937_64;

// Seeds an engine from (seed, stream) so that independent streams derived
// from one base seed do not overlap in practice.
Rng MakeRng(std::uint64_t seed, std::uint64_t stream = 0);

enum class ValueFamily {
  kUniform,    // i.i.d. uniform[lower, upper]
  kConstant,   // every agent gets `constant`
  kPolarized,  // `upper` on one favourite alternative, zero elsewhere
};

std::string_view ValueFamilyName(ValueFamily family);
ValueFamily ParseValueFamily(std::string_view name);

struct GeneratorSpec {
  std::size_t n = 1;
  std::size_t m = 2;
  ValueFamily family = ValueFamily::kUniform;
  double lower = 0.0;
  double upper = 1.0;
  // kConstant: per-alternative value shared by all agents (length m).
  Vector constant;
  // kPolarized: probability that an agent's favourite is alternative 0; the
  // remaining mass is spread uniformly over the other alternatives.
  double favour_first = 0.5;
};

// Deterministic for a fixed (spec, seed). Throws kInvalidArgument on n = 0,
// m < 2, or bounds that would produce negative values.
ValueProfile GenerateInstance(const GeneratorSpec& spec, std::uint64_t seed);

// External welfare B >= 0 chosen so that max_k (V_k + B_k) equals
// target_spread * max_value exactly, with the top alternative picked at
// random. Throws when some V_k already exceeds the target.
ExternalWelfare GenerateExternalForSpread(const ValueProfile& profile,
                                          double target_spread,
                                          std::uint64_t seed);

}  // namespace qtmlab

#endif  // QTMLAB_GENERATOR_HPP_
