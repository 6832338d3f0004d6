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

#include "qtmlab/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "qtmlab/error.hpp"

namespace qtmlab {
namespace {

std::vector<std::size_t> SortedOrder(const Vector& welfare) {
  std::vector<std::size_t> order(static_cast<std::size_t>(welfare.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return welfare(static_cast<Eigen::Index>(a)) >
           welfare(static_cast<Eigen::Index>(b));
  });
  return order;
}

}  // namespace

ValueProfile::ValueProfile(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1) ThrowInvalid("value profile needs at least one agent");
  if (values_.cols() < 2) {
    ThrowInvalid("value profile needs at least two alternatives");
  }
  if (!values_.allFinite()) ThrowInvalid("value profile has non-finite entries");
  if ((values_.array() < 0.0).any()) {
    ThrowInvalid("value profile has negative entries");
  }
  aggregates_ = values_.colwise().sum().transpose();
  if (!aggregates_.allFinite()) ThrowInvalid("aggregate values overflow");
  max_value_ = values_.maxCoeff();
  order_ = SortedOrder(aggregates_);
}

double ValueProfile::agent_max(std::size_t i) const {
  return values_.row(static_cast<Eigen::Index>(i)).maxCoeff();
}

ValueProfile ValueProfile::Reindexed(std::span<const std::size_t> order) const {
  if (order.size() != alternatives()) {
    ThrowInvalid("reindex permutation has wrong length");
  }
  Matrix out(values_.rows(), values_.cols());
  for (std::size_t j = 0; j < order.size(); ++j) {
    if (order[j] >= alternatives()) ThrowInvalid("reindex index out of range");
    out.col(static_cast<Eigen::Index>(j)) =
        values_.col(static_cast<Eigen::Index>(order[j]));
  }
  return ValueProfile(std::move(out));
}

ValueProfile ValueProfile::WithAgents(const Matrix& extra) const {
  if (extra.cols() != values_.cols()) {
    ThrowInvalid("appended agents have the wrong number of alternatives");
  }
  Matrix out(values_.rows() + extra.rows(), values_.cols());
  out << values_, extra;
  return ValueProfile(std::move(out));
}

bool IsConcaveRegime(double c, const ValueProfile& profile) {
  return c >= 0.5 * profile.max_value();
}

MechanismParams MechanismParams::Create(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    ThrowInvalid("cost coefficient c must be positive and finite, got " +
                 std::to_string(c));
  }
  return MechanismParams{c, false};
}

MechanismParams MechanismParams::Create(double c, const ValueProfile& profile) {
  MechanismParams params = Create(c);
  params.concave_regime = IsConcaveRegime(c, profile);
  return params;
}

MechanismParams MechanismParams::HalfMaxValue(const ValueProfile& profile) {
  if (!(profile.max_value() > 0.0)) {
    throw Error(ErrorCode::kDegenerateInstance,
                "all values are zero; c = max value / 2 is undefined");
  }
  return Create(0.5 * profile.max_value(), profile);
}

VoteProfile::VoteProfile(Matrix votes) : votes_(std::move(votes)) {
  if (!votes_.allFinite()) ThrowInvalid("vote profile has non-finite entries");
}

VoteProfile VoteProfile::Zero(std::size_t n, std::size_t m) {
  return VoteProfile(Matrix::Zero(static_cast<Eigen::Index>(n),
                                  static_cast<Eigen::Index>(m)));
}

Vector VoteProfile::Aggregates() const {
  return votes_.colwise().sum().transpose();
}

Vector VoteProfile::AgentSums() const { return votes_.rowwise().sum(); }

SoftmaxOutcome::SoftmaxOutcome(Vector p) : p_(std::move(p)) {
  if (p_.size() < 1 || !p_.allFinite() || (p_.array() < 0.0).any()) {
    ThrowInvalid("probability vector must be finite and nonnegative");
  }
  if (std::abs(p_.sum() - 1.0) > 1e-12) {
    ThrowInvalid("probability vector does not sum to one");
  }
}

ExternalWelfare ExternalWelfare::Truthful(Vector b) {
  Vector bhat = b;
  return Create(std::move(b), std::move(bhat));
}

ExternalWelfare ExternalWelfare::Create(Vector b, Vector bhat) {
  if (b.size() != bhat.size()) ThrowInvalid("B and Bhat differ in length");
  if (!b.allFinite() || !bhat.allFinite()) {
    ThrowInvalid("external welfare must be finite");
  }
  if ((b.array() < 0.0).any()) ThrowInvalid("external welfare B must be >= 0");
  return ExternalWelfare{std::move(b), std::move(bhat)};
}

}  // namespace qtmlab
