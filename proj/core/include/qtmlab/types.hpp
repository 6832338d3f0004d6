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

#ifndef QTMLAB_TYPES_HPP_
#define QTMLAB_TYPES_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qtmlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Nonnegative agent values v_k^i stored agents x alternatives. Immutable
// after construction.
class ValueProfile {
 public:
  // Throws kInvalidArgument on negative or non-finite entries, n < 1, m < 2.
  explicit ValueProfile(Matrix values);

  std::size_t agents() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t alternatives() const {
    return static_cast<std::size_t>(values_.cols());
  }

  const Matrix& values() const { return values_; }
  Eigen::Ref<const Eigen::RowVectorXd> agent(std::size_t i) const {
    return values_.row(static_cast<Eigen::Index>(i));
  }
  double value(std::size_t i, std::size_t k) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  }

  // V_k = sum_i v_k^i.
  const Vector& aggregates() const { return aggregates_; }
  // max_{i,k} v_k^i.
  double max_value() const { return max_value_; }
  double agent_max(std::size_t i) const;

  // Alternative indices sorted by nonincreasing aggregate value, ties broken by
  // original index.
  const std::vector<std::size_t>& canonical_order() const { return order_; }

  // Profile whose alternative j is this profile's alternative order[j].
  ValueProfile Reindexed(std::span<const std::size_t> order) const;
  ValueProfile Canonical() const { return Reindexed(order_); }

  // Profile with the rows of `extra` appended as additional agents.
  ValueProfile WithAgents(const Matrix& extra) const;

 private:
  Matrix values_;
  Vector aggregates_;
  double max_value_ = 0.0;
  std::vector<std::size_t> order_;
};

// Quadratic cost coefficient c.
struct MechanismParams {
  double c = 1.0;
  // c >= max_{i,k} v_k^i / 2 for the profile the params were built against.
  bool concave_regime = false;

  // Throws unless c > 0 and finite.
  static MechanismParams Create(double c, const ValueProfile& profile);
  static MechanismParams Create(double c);
  // c = max_{i,k} v_k^i / 2, the smallest coefficient covered by the
  // concavity and existence guarantees. Throws on an all-zero profile.
  static MechanismParams HalfMaxValue(const ValueProfile& profile);
};

bool IsConcaveRegime(double c, const ValueProfile& profile);

// Real vote matrix a_k^i, agents x alternatives.
class VoteProfile {
 public:
  explicit VoteProfile(Matrix votes);
  static VoteProfile Zero(std::size_t n, std::size_t m);

  std::size_t agents() const { return static_cast<std::size_t>(votes_.rows()); }
  std::size_t alternatives() const {
    return static_cast<std::size_t>(votes_.cols());
  }
  const Matrix& votes() const { return votes_; }
  Matrix& mutable_votes() { return votes_; }
  Eigen::Ref<const Eigen::RowVectorXd> agent(std::size_t i) const {
    return votes_.row(static_cast<Eigen::Index>(i));
  }

  // A_k = sum_i a_k^i.
  Vector Aggregates() const;
  // sum_k a_k^i per agent.
  Vector AgentSums() const;

 private:
  Matrix votes_;
};

// Softmax probabilities over the alternatives.
class SoftmaxOutcome {
 public:
  // Validates a probability vector (nonnegative, sums to 1 within 1e-12).
  explicit SoftmaxOutcome(Vector p);

  const Vector& p() const { return p_; }
  double operator[](std::size_t k) const {
    return p_(static_cast<Eigen::Index>(k));
  }
  std::size_t size() const { return static_cast<std::size_t>(p_.size()); }

 private:
  Vector p_;
};

// True external welfare impacts B and elicited estimates Bhat.
struct ExternalWelfare {
  Vector B;
  Vector Bhat;

  // Truthful elicitation: Bhat = B. B must be nonnegative.
  static ExternalWelfare Truthful(Vector b);
  static ExternalWelfare Create(Vector b, Vector bhat);

  // W_k = V_k + B_k.
  Vector TrueWelfare(const Vector& aggregates) const { return aggregates + B; }
  // What_k = V_k + Bhat_k.
  Vector ElicitedWelfare(const Vector& aggregates) const {
    return aggregates + Bhat;
  }
};

struct InstanceStats {
  double spread = 0.0;                 // T
  double gap = 0.0;                    // G
  std::optional<double> disagreement;  // D, only for m = 2 with a strict gap
  double max_value = 0.0;
  Vector welfare;                      // V or W, canonical order
  std::vector<std::size_t> order;      // canonical order of alternatives
};

}  // namespace qtmlab

#endif  // QTMLAB_TYPES_HPP_
