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

#ifndef QTMLAB_EQUILIBRIUM_HPP_
#define QTMLAB_EQUILIBRIUM_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qtmlab/types.hpp"

namespace qtmlab {

enum class SolveStatus { kConverged, kMaxIterations, kNotApplicable };

std::string_view SolveStatusName(SolveStatus status);

// ---------------------------------------------------------------------------
// Aggregate first-order conditions
//
// In a pure equilibrium the aggregate votes satisfy
//   A_k = p_k / (2c) * (V_k - sum_l p_l V_l),   p = softmax(A).
// The same equations, with V replaced by any welfare vector W, drive the
// synthetic-players mechanism.
// ---------------------------------------------------------------------------

// Right-hand side F(A) of the aggregate conditions.
Vector FocMap(const Vector& aggregate_votes, const Vector& welfare, double c);

// max_k |A_k - F_k(A)|.
double FocResidual(const Vector& aggregate_votes, const Vector& welfare,
                   double c);

struct TwoAltSolution {
  double a1 = 0.0;  // aggregate vote for the better alternative; A_2 = -A_1
  double p1 = 0.5;
  double residual = 0.0;
  int iterations = 0;
};

// Root of A - (V1 - V2) / (2c (e^A + e^-A)^2) by bisection on
// [0, (V1 - V2) / (8c)]. Requires V1 >= V2 (canonical order) and c > 0.
TwoAltSolution SolveTwoAlt(double v1, double v2, const MechanismParams& params,
                           double tol = 1e-12);

struct FixedPointOptions {
  double damping = 0.5;
  int max_iter = 100000;
  double tol = 1e-10;
  // Take safeguarded Newton steps on A - F(A) whenever they reduce the
  // residual; otherwise fall back to the damped map.
  bool newton = true;
};

struct FixedPointResult {
  Vector aggregates;
  Vector p;
  double residual = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::kMaxIterations;
};

// Damped iteration A <- (1 - lambda) A + lambda F(A) from `start` (zero by
// default). Never throws on non-convergence; inspect `status`.
FixedPointResult SolveFocFixedPoint(const Vector& welfare,
                                    const MechanismParams& params,
                                    const FixedPointOptions& options = {},
                                    const std::optional<Vector>& start = {});

// Aggregate-condition solver for any m and any ordering of `welfare`: exact
// bisection for m = 2, fixed-point iteration otherwise.
FixedPointResult SolveAggregateFoc(const Vector& welfare,
                                   const MechanismParams& params,
                                   const FixedPointOptions& options = {});

// Fixed points reached from A = 0 plus `random_starts` seeded random starts
// inside the box that contains every fixed point. Converged solutions that
// agree within `distinct_tol` (max-norm) are merged; the one from A = 0 comes
// first.
std::vector<FixedPointResult> SolveFocMultiStart(
    const Vector& welfare, const MechanismParams& params, int random_starts,
    std::uint64_t seed, const FixedPointOptions& options = {},
    double distinct_tol = 1e-7);

// a_k^i = p_k / (2c) * (v_k^i - sum_l p_l v_l^i).
VoteProfile VotesFromAggregate(const ValueProfile& values, const Vector& p,
                               const MechanismParams& params);

struct BestResponseOptions {
  double tol = 1e-10;  // projected-gradient stationarity
  int max_iter = 500;
  int restarts = 8;    // used only outside the concave regime
  std::uint64_t seed = 0x5eed;
};

struct BestResponseResult {
  Vector votes;
  double utility = 0.0;      // without the redistribution term
  double stationarity = 0.0; // max-norm of the projected gradient
  bool on_boundary = false;
  bool heuristic = false;    // nonconcave regime: local search, no guarantee
  int iterations = 0;
};

// Maximises sum_k p_k(a + others) v_k - c |a|^2 over the dominated box
// [-r, r]^m with r = sqrt(max_k v_k / c). `others` is the aggregate vote of
// everybody else, including committed synthetic votes. `warm_start` seeds
// the search.
BestResponseResult BestResponse(const Vector& others,
                                const Eigen::Ref<const Eigen::RowVectorXd>& agent_values,
                                const MechanismParams& params,
                                const BestResponseOptions& options = {},
                                const std::optional<Vector>& warm_start = {});

struct EquilibriumCheck {
  double foc_residual = 0.0;
  double br_slack = 0.0;
  bool Certified(double tol) const {
    return foc_residual <= tol && br_slack <= tol;
  }
};

// FOC violation (per-agent and aggregate conditions) and the largest utility
// improvement any agent can find by best-responding. `offset` is a committed
// vote vector added to the aggregate before the softmax.
EquilibriumCheck VerifyEquilibrium(const VoteProfile& votes,
                                   const ValueProfile& values,
                                   const MechanismParams& params,
                                   const std::optional<Vector>& offset = {},
                                   bool compute_br_slack = true);

// Per-agent FOC residual only (cheap).
double AgentFocResidual(const VoteProfile& votes, const ValueProfile& values,
                        const MechanismParams& params,
                        const std::optional<Vector>& offset = {});

struct EquilibriumSolution {
  VoteProfile votes = VoteProfile::Zero(0, 0);
  Vector aggregates;
  Vector p;
  double foc_residual = 0.0;
  double br_slack = 0.0;
  SolveStatus status = SolveStatus::kNotApplicable;
  int iterations = 0;
};

struct SolveOptions {
  FixedPointOptions fixed_point;
  bool compute_br_slack = true;
};

// Solve the aggregate conditions, split into agent votes, then certify.
EquilibriumSolution SolveEquilibrium(const ValueProfile& values,
                                     const MechanismParams& params,
                                     const SolveOptions& options = {});

// Every distinct equilibrium found by the multi-start fixed point solver.
std::vector<EquilibriumSolution> SolveEquilibria(const ValueProfile& values,
                                                 const MechanismParams& params,
                                                 int random_starts,
                                                 std::uint64_t seed,
                                                 const SolveOptions& options = {});

struct DynamicsTrace {
  std::vector<VoteProfile> trajectory;  // state after each round
  std::vector<double> residuals;        // agent FOC residual after each round
};

// Sequential round-robin best responses starting from `init`.
DynamicsTrace BestResponseDynamics(const ValueProfile& values,
                                   const MechanismParams& params,
                                   const VoteProfile& init, int rounds,
                                   const BestResponseOptions& options = {});

}  // namespace qtmlab

#endif  // QTMLAB_EQUILIBRIUM_HPP_
