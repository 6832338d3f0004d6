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

#include "qtmlab/generator.hpp"

#include <string>

#include "qtmlab/error.hpp"

namespace qtmlab {

Rng MakeRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
  return Rng(seq);
}

std::string_view ValueFamilyName(ValueFamily family) {
  switch (family) {
    case ValueFamily::kUniform:
      return "uniform";
    case ValueFamily::kConstant:
      return "constant";
    case ValueFamily::kPolarized:
      return "polarized";
  }
  return "uniform";
}

ValueFamily ParseValueFamily(std::string_view name) {
  if (name == "uniform") return ValueFamily::kUniform;
  if (name == "constant") return ValueFamily::kConstant;
  if (name == "polarized") return ValueFamily::kPolarized;
  ThrowInvalid("unknown value family '" + std::string(name) + "'");
}

ValueProfile GenerateInstance(const GeneratorSpec& spec, std::uint64_t seed) {
  if (spec.n == 0) ThrowInvalid("generator needs n >= 1");
  if (spec.m < 2) ThrowInvalid("generator needs m >= 2");
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto m = static_cast<Eigen::Index>(spec.m);
  Matrix values = Matrix::Zero(n, m);
  Rng rng = MakeRng(seed);

  switch (spec.family) {
    case ValueFamily::kUniform: {
      if (spec.lower < 0.0 || !(spec.upper >= spec.lower)) {
        ThrowInvalid("uniform generator needs 0 <= lower <= upper");
      }
      std::uniform_real_distribution<double> dist(spec.lower, spec.upper);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < m; ++k) values(i, k) = dist(rng);
      }
      break;
    }
    case ValueFamily::kConstant: {
      if (spec.constant.size() != m) {
        ThrowInvalid("constant generator needs one value per alternative");
      }
      if ((spec.constant.array() < 0.0).any()) {
        ThrowInvalid("constant generator values must be nonnegative");
      }
      values.rowwise() = spec.constant.transpose();
      break;
    }
    case ValueFamily::kPolarized: {
      if (spec.upper < 0.0) ThrowInvalid("polarized generator needs upper >= 0");
      if (spec.favour_first < 0.0 || spec.favour_first > 1.0) {
        ThrowInvalid("favour_first must lie in [0, 1]");
      }
      std::bernoulli_distribution first(spec.favour_first);
      std::uniform_int_distribution<Eigen::Index> other(1, m - 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index fav = first(rng) ? 0 : other(rng);
        values(i, fav) = spec.upper;
      }
      break;
    }
  }
  return ValueProfile(std::move(values));
}

ExternalWelfare GenerateExternalForSpread(const ValueProfile& profile,
                                          double target_spread,
                                          std::uint64_t seed) {
  if (!(profile.max_value() > 0.0)) {
    throw Error(ErrorCode::kDegenerateInstance, "all agent values are zero");
  }
  const double target = target_spread * profile.max_value();
  const Vector& aggregates = profile.aggregates();
  if (aggregates.maxCoeff() > target) {
    ThrowInvalid("target spread " + std::to_string(target_spread) +
                 " is below the spread of the agents alone");
  }
  Rng rng = MakeRng(seed, 0xB);
  const auto m = aggregates.size();
  std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Index top = pick(rng);
  Vector b(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double room = target - aggregates(k);
    b(k) = k == top ? room : unit(rng) * room;
  }
  return ExternalWelfare::Truthful(std::move(b));
}

}  // namespace qtmlab
