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

#ifndef QTMLAB_QTM_HPP_
#define QTMLAB_QTM_HPP_

#include <optional>

#include "qtmlab/types.hpp"

namespace qtmlab {

// p_k = exp(A_k) / sum_l exp(A_l), evaluated with the maximum subtracted
// first. Throws kInvalidArgument on non-finite input.
SoftmaxOutcome Softmax(const Vector& aggregate_votes);

// Expected utility of agent i over the mechanism's randomness:
//   sum_k p_k v_k^i - c sum_k (a_k^i)^2 [+ c/(n-1) sum_{j != i} sum_k (a_k^j)^2]
// Redistribution requires n >= 2.
double Utility(std::size_t agent, const VoteProfile& votes,
               const ValueProfile& values, const MechanismParams& params,
               bool redistribute);

// Utility of an agent with values `agent_values` casting `own_votes` against
// the aggregate `others` of everybody else (including any synthetic votes),
// without the redistribution term.
double StrategicUtility(const Eigen::Ref<const Eigen::RowVectorXd>& own_votes,
                        const Vector& others,
                        const Eigen::Ref<const Eigen::RowVectorXd>& agent_values,
                        double c);

// Gradient of StrategicUtility with respect to own_votes.
Vector StrategicGradient(const Eigen::Ref<const Eigen::RowVectorXd>& own_votes,
                         const Vector& others,
                         const Eigen::Ref<const Eigen::RowVectorXd>& agent_values,
                         double c);

struct PaymentReport {
  Vector charge;  // c * sum_k (a_k^i)^2
  Vector rebate;  // redistribution receipts, zero when disabled
  Vector net;     // charge - rebate (positive means the agent pays)
  double revenue = 0.0;
};

PaymentReport Settle(const VoteProfile& votes, const MechanismParams& params,
                     bool redistribute);

// r_i = sqrt(max_l v_l^i / c). Any vote with |a_k^i| > r_i is strictly
// dominated by abstaining.
Vector DominatedBox(const ValueProfile& values, const MechanismParams& params);

struct HessianReport {
  Matrix H;  // Hessian of u^i with respect to agent i's own votes
  double max_eigenvalue = 0.0;
  bool negative_definite = false;
};

// Closed-form Hessian of agent i's utility at the vote profile, reported for
// u itself (c times the Hessian of u / c).
HessianReport Hessian(std::size_t agent, const VoteProfile& votes,
                      const ValueProfile& values, const MechanismParams& params);

// Same, given the outcome p and one agent's values directly.
HessianReport HessianAt(const Vector& p,
                        const Eigen::Ref<const Eigen::RowVectorXd>& agent_values,
                        double c);

// Expected aggregate value sum_k p_k V_k, or sum_k p_k W_k with external
// welfare (true impacts B).
double Welfare(const SoftmaxOutcome& outcome, const ValueProfile& values,
               const std::optional<ExternalWelfare>& external = {});
double Welfare(const SoftmaxOutcome& outcome, const Vector& welfare);

}  // namespace qtmlab

#endif  // QTMLAB_QTM_HPP_
