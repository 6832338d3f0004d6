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

#include "qtmlab/qtm.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "qtmlab/error.hpp"

namespace qtmlab {
namespace {

Vector SoftmaxVector(const Vector& a) {
  const double shift = a.maxCoeff();
  Vector e = (a.array() - shift).exp();
  return e / e.sum();
}

void CheckAgent(std::size_t agent, std::size_t n) {
  if (agent >= n) ThrowInvalid("agent index out of range");
}

}  // namespace

SoftmaxOutcome Softmax(const Vector& aggregate_votes) {
  if (aggregate_votes.size() < 1) ThrowInvalid("softmax of an empty vector");
  if (!aggregate_votes.allFinite()) ThrowInvalid("softmax input is not finite");
  return SoftmaxOutcome(SoftmaxVector(aggregate_votes));
}

double Utility(std::size_t agent, const VoteProfile& votes,
               const ValueProfile& values, const MechanismParams& params,
               bool redistribute) {
  const std::size_t n = votes.agents();
  if (n != values.agents() || votes.alternatives() != values.alternatives()) {
    ThrowInvalid("vote and value profiles differ in shape");
  }
  CheckAgent(agent, n);
  if (redistribute && n < 2) {
    ThrowInvalid("redistribution divides by n - 1 and needs n >= 2");
  }
  const auto row = static_cast<Eigen::Index>(agent);
  const Vector p = SoftmaxVector(votes.Aggregates());
  double u = values.values().row(row).dot(p.transpose()) -
             params.c * votes.votes().row(row).squaredNorm();
  if (redistribute) {
    const double others =
        votes.votes().squaredNorm() - votes.votes().row(row).squaredNorm();
    u += params.c / static_cast<double>(n - 1) * others;
  }
  return u;
}

double StrategicUtility(const Eigen::Ref<const Eigen::RowVectorXd>& own_votes,
                        const Vector& others,
                        const Eigen::Ref<const Eigen::RowVectorXd>& agent_values,
                        double c) {
  const Vector p = SoftmaxVector(others + own_votes.transpose());
  return agent_values.dot(p.transpose()) - c * own_votes.squaredNorm();
}

Vector StrategicGradient(const Eigen::Ref<const Eigen::RowVectorXd>& own_votes,
                         const Vector& others,
                         const Eigen::Ref<const Eigen::RowVectorXd>& agent_values,
                         double c) {
  const Vector p = SoftmaxVector(others + own_votes.transpose());
  const Vector v = agent_values.transpose();
  const double expected = p.dot(v);
  return (p.array() * (v.array() - expected)).matrix() -
         2.0 * c * own_votes.transpose();
}

PaymentReport Settle(const VoteProfile& votes, const MechanismParams& params,
                     bool redistribute) {
  const auto n = static_cast<Eigen::Index>(votes.agents());
  if (redistribute && n < 2) {
    ThrowInvalid("redistribution divides by n - 1 and needs n >= 2");
  }
  PaymentReport report;
  report.charge = params.c * votes.votes().rowwise().squaredNorm();
  report.revenue = report.charge.sum();
  report.rebate = Vector::Zero(n);
  if (redistribute) {
    const double share = 1.0 / static_cast<double>(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      report.rebate(i) = share * (report.revenue - report.charge(i));
    }
  }
  report.net = report.charge - report.rebate;
  return report;
}

Vector DominatedBox(const ValueProfile& values, const MechanismParams& params) {
  const auto n = static_cast<Eigen::Index>(values.agents());
  Vector bound(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    bound(i) = std::sqrt(values.values().row(i).maxCoeff() / params.c);
  }
  return bound;
}

HessianReport HessianAt(const Vector& p,
                        const Eigen::Ref<const Eigen::RowVectorXd>& agent_values,
                        double c) {
  const auto m = p.size();
  const Vector v = agent_values.transpose();
  const double expected = p.dot(v);
  // Hessian of u/c, then scaled by c.
  Matrix h(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    h(k, k) = p(k) / c * (2.0 * p(k) - 1.0) * (expected - v(k)) - 2.0;
    for (Eigen::Index l = k + 1; l < m; ++l) {
      const double off = p(k) * p(l) / c * (2.0 * expected - v(k) - v(l));
      h(k, l) = off;
      h(l, k) = off;
    }
  }
  HessianReport report;
  report.H = c * h;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(report.H, Eigen::EigenvaluesOnly);
  report.max_eigenvalue = eig.eigenvalues().maxCoeff();
  report.negative_definite = report.max_eigenvalue < 0.0;
  return report;
}

HessianReport Hessian(std::size_t agent, const VoteProfile& votes,
                      const ValueProfile& values, const MechanismParams& params) {
  CheckAgent(agent, values.agents());
  if (votes.alternatives() != values.alternatives()) {
    ThrowInvalid("vote and value profiles differ in alternatives");
  }
  return HessianAt(SoftmaxVector(votes.Aggregates()), values.agent(agent),
                   params.c);
}

double Welfare(const SoftmaxOutcome& outcome, const Vector& welfare) {
  if (static_cast<Eigen::Index>(outcome.size()) != welfare.size()) {
    ThrowInvalid("outcome and welfare vectors differ in length");
  }
  return outcome.p().dot(welfare);
}

double Welfare(const SoftmaxOutcome& outcome, const ValueProfile& values,
               const std::optional<ExternalWelfare>& external) {
  if (external) return Welfare(outcome, external->TrueWelfare(values.aggregates()));
  return Welfare(outcome, values.aggregates());
}

}  // namespace qtmlab
