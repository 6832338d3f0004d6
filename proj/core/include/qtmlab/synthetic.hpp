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

#ifndef QTMLAB_SYNTHETIC_HPP_
#define QTMLAB_SYNTHETIC_HPP_

#include <cstddef>
#include <optional>

#include "qtmlab/equilibrium.hpp"
#include "qtmlab/qtm.hpp"
#include "qtmlab/types.hpp"

namespace qtmlab {

// Synthetic-players QTM: the mechanism votes on behalf of external welfare.
//
// The synthetic votes follow the agent first-order conditions with the
// external impacts as the synthetic value vector:
//   A_k      = p_k / (2c) (W_k - sum_l p_l W_l),   W = V + Bhat
//   a_mech_k = p_k / (2c) (Bhat_k - sum_l p_l Bhat_l)
// `scaled_by_cost = false` drops the 1/(2c) factor from both equations
// (equivalent to solving them with c = 1/2); it exists for comparison only.
struct SyntheticOptions {
  bool scaled_by_cost = true;
  FixedPointOptions fixed_point;
};

struct SyntheticCommitment {
  Vector aggregates;  // A, announced
  Vector a_mech;      // synthetic votes, announced
  Vector p;           // softmax(A)
  Vector welfare;     // V + Bhat used to solve
  double residual = 0.0;
  double c = 0.0;     // coefficient the equations were solved with
};

// Impractical variant, steps 3-4: solve the welfare conditions for A and
// derive the synthetic votes. Throws kSolverFailure (stage "commit") when the
// fixed point does not converge.
SyntheticCommitment Commit(const Vector& aggregate_values, const Vector& bhat,
                           const MechanismParams& params,
                           const SyntheticOptions& options = {});

// Agent votes of the focal equilibrium announced by a commitment.
VoteProfile FocalVotes(const ValueProfile& values,
                       const SyntheticCommitment& commitment,
                       const MechanismParams& params);

struct ImpracticalResult {
  SoftmaxOutcome outcome;
  PaymentReport payments;
};

// Impractical variant, step 5: p'_k ∝ exp(a_mech_k + sum_i a_k^i), payments
// exactly as in the QTM.
ImpracticalResult RunImpractical(const SyntheticCommitment& commitment,
                                 const VoteProfile& agent_votes,
                                 const MechanismParams& params,
                                 bool redistribute);

struct PracticalTwoAltResult {
  double p1 = 0.5;
  double residual = 0.0;
  Vector a_mech;  // synthetic votes at the solution
  int iterations = 0;
  bool used_bisection = false;
};

// Practical variant for two alternatives: the p_1 solving
//   p_1 = sigma(S_1 - S_2 + p_1 (1 - p_1) (Bhat_1 - Bhat_2) / c)
// where S are the submitted agent vote sums. Damped iteration first, then
// bisection on the sign change of the residual over (0, 1).
PracticalTwoAltResult SolvePracticalTwoAlt(const Vector& agent_vote_sums,
                                           const Vector& bhat,
                                           const MechanismParams& params,
                                           double tol = 1e-13,
                                           const SyntheticOptions& options = {});

// Default number of synthetic players: ceil(max_k B_k / 2c) + 1.
std::size_t DefaultSyntheticPlayers(const Vector& external,
                                    const MechanismParams& params);

// Plain-QTM equilibrium of the game with `synthetic_players` extra agents
// each valuing alternative k at B_k / synthetic_players. Requires
// synthetic_players >= max_k B_k / 2c.
EquilibriumSolution SyntheticGameOracle(const ValueProfile& values,
                                        const Vector& external,
                                        const MechanismParams& params,
                                        std::optional<std::size_t> synthetic_players = {});

// Commitment-power experiment on the practical variant: one agent scans a
// grid of vote deviations while everyone else plays focal votes.
struct ManipulationReport {
  double focal_p1 = 0.5;
  double focal_utility = 0.0;
  double best_gain = 0.0;              // deviator utility gain at best grid point
  Vector best_deviation;
  double welfare_ratio_at_best = 1.0;  // sum p W / max W at that deviation
  double worst_welfare_ratio = 1.0;    // over the whole grid
};

ManipulationReport PracticalManipulationExperiment(
    const ValueProfile& values, const Vector& bhat, const Vector& true_external,
    const MechanismParams& params, std::size_t deviator, int grid_points,
    const SyntheticOptions& options = {});

}  // namespace qtmlab

#endif  // QTMLAB_SYNTHETIC_HPP_
