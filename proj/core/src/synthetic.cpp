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

#include "qtmlab/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtmlab/error.hpp"

namespace qtmlab {
namespace {

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double EffectiveCost(const MechanismParams& params, const SyntheticOptions& options) {
  return options.scaled_by_cost ? params.c : 0.5;
}

Vector SyntheticVotes(const Vector& p, const Vector& bhat, double c) {
  const double mean = p.dot(bhat);
  return (p.array() * (bhat.array() - mean)).matrix() / (2.0 * c);
}

}  // namespace

SyntheticCommitment Commit(const Vector& aggregate_values, const Vector& bhat,
                           const MechanismParams& params,
                           const SyntheticOptions& options) {
  if (aggregate_values.size() != bhat.size()) {
    ThrowInvalid("aggregate values and Bhat differ in length");
  }
  if (!bhat.allFinite()) ThrowInvalid("Bhat must be finite");
  const double c_eff = EffectiveCost(params, options);
  const MechanismParams eff = MechanismParams::Create(c_eff);

  SyntheticCommitment out;
  out.welfare = aggregate_values + bhat;
  out.c = c_eff;
  const FixedPointResult fp =
      SolveAggregateFoc(out.welfare, eff, options.fixed_point);
  if (fp.status != SolveStatus::kConverged) {
    throw Error(ErrorCode::kSolverFailure,
                "welfare fixed point did not converge (residual " +
                    std::to_string(fp.residual) + ")",
                "commit");
  }
  out.aggregates = fp.aggregates;
  out.p = fp.p;
  out.residual = fp.residual;
  out.a_mech = SyntheticVotes(out.p, bhat, c_eff);
  return out;
}

VoteProfile FocalVotes(const ValueProfile& values,
                       const SyntheticCommitment& commitment,
                       const MechanismParams& params) {
  return VotesFromAggregate(values, commitment.p, params);
}

ImpracticalResult RunImpractical(const SyntheticCommitment& commitment,
                                 const VoteProfile& agent_votes,
                                 const MechanismParams& params,
                                 bool redistribute) {
  if (static_cast<Eigen::Index>(agent_votes.alternatives()) !=
      commitment.a_mech.size()) {
    ThrowInvalid("agent votes do not match the commitment");
  }
  const Vector total = commitment.a_mech + agent_votes.Aggregates();
  return ImpracticalResult{Softmax(total), Settle(agent_votes, params, redistribute)};
}

PracticalTwoAltResult SolvePracticalTwoAlt(const Vector& agent_vote_sums,
                                           const Vector& bhat,
                                           const MechanismParams& params,
                                           double tol,
                                           const SyntheticOptions& options) {
  if (agent_vote_sums.size() != 2 || bhat.size() != 2) {
    ThrowInvalid("practical two-alternative solver needs m = 2");
  }
  const double c_eff = EffectiveCost(params, options);
  const double ds = agent_vote_sums(0) - agent_vote_sums(1);
  const double db = bhat(0) - bhat(1);
  // Exponent difference: (S1 - S2) + 2 * p1 p2 (B1 - B2) / (2c).
  auto target = [&](double p1) { return Sigmoid(ds + p1 * (1.0 - p1) * db / c_eff); };
  auto residual = [&](double p1) { return p1 - target(p1); };

  PracticalTwoAltResult out;
  double p1 = 0.5;
  double res = residual(p1);
  int it = 0;
  for (; it < 500 && std::abs(res) > tol; ++it) {
    p1 = 0.5 * p1 + 0.5 * target(p1);
    res = residual(p1);
  }
  out.iterations = it;
  if (std::abs(res) > tol || !std::isfinite(res)) {
    out.used_bisection = true;
    double lo = 0.0;
    double hi = 1.0;
    const double rlo = residual(lo);
    const double rhi = residual(hi);
    if (rlo > 0.0 || rhi < 0.0) {
      throw Error(ErrorCode::kSolverFailure,
                  "practical fixed point residual does not change sign", "decision");
    }
    for (int b = 0; b < 200; ++b) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (residual(mid) < 0.0 ? lo : hi) = mid;
      ++out.iterations;
    }
    p1 = std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
    res = residual(p1);
  }
  out.p1 = p1;
  out.residual = std::abs(res);
  Vector p(2);
  p << p1, 1.0 - p1;
  out.a_mech = SyntheticVotes(p, bhat, c_eff);
  return out;
}

std::size_t DefaultSyntheticPlayers(const Vector& external,
                                    const MechanismParams& params) {
  const double need = external.size() ? external.maxCoeff() / (2.0 * params.c) : 0.0;
  return static_cast<std::size_t>(std::ceil(std::max(0.0, need))) + 1;
}

EquilibriumSolution SyntheticGameOracle(const ValueProfile& values,
                                        const Vector& external,
                                        const MechanismParams& params,
                                        std::optional<std::size_t> synthetic_players) {
  if (external.size() != static_cast<Eigen::Index>(values.alternatives())) {
    ThrowInvalid("external welfare length does not match alternatives");
  }
  if ((external.array() < 0.0).any()) {
    ThrowInvalid("synthetic players need nonnegative external welfare");
  }
  const std::size_t n_hat =
      synthetic_players.value_or(DefaultSyntheticPlayers(external, params));
  if (n_hat == 0 ||
      static_cast<double>(n_hat) < external.maxCoeff() / (2.0 * params.c)) {
    ThrowInvalid("need at least max_k B_k / 2c synthetic players, got " +
                 std::to_string(n_hat));
  }
  Matrix synthetic(static_cast<Eigen::Index>(n_hat), external.size());
  synthetic.rowwise() = external.transpose() / static_cast<double>(n_hat);
  const ValueProfile game = values.WithAgents(synthetic);
  return SolveEquilibrium(game, params);
}

ManipulationReport PracticalManipulationExperiment(
    const ValueProfile& values, const Vector& bhat, const Vector& true_external,
    const MechanismParams& params, std::size_t deviator, int grid_points,
    const SyntheticOptions& options) {
  if (values.alternatives() != 2) {
    ThrowInvalid("manipulation experiment is defined for two alternatives");
  }
  if (deviator >= values.agents()) ThrowInvalid("deviator index out of range");
  if (grid_points < 2) ThrowInvalid("grid needs at least two points per axis");

  const SyntheticCommitment commitment =
      Commit(values.aggregates(), bhat, params, options);
  const VoteProfile focal = FocalVotes(values, commitment, params);
  const Vector sums = focal.Aggregates();
  const Vector welfare = values.aggregates() + true_external;
  const double best_welfare = welfare.maxCoeff();
  const auto row = values.agent(deviator);
  const Vector own = focal.agent(deviator).transpose();

  auto evaluate = [&](const Vector& dev, double* utility, double* ratio) {
    const Vector s = sums - own + dev;
    const PracticalTwoAltResult r = SolvePracticalTwoAlt(s, bhat, params, 1e-13, options);
    Vector p(2);
    p << r.p1, 1.0 - r.p1;
    *utility = row.dot(p.transpose()) - params.c * dev.squaredNorm();
    *ratio = p.dot(welfare) / best_welfare;
    return r.p1;
  };

  ManipulationReport report;
  double focal_ratio = 1.0;
  report.focal_p1 = evaluate(own, &report.focal_utility, &focal_ratio);
  report.best_deviation = own;
  report.welfare_ratio_at_best = focal_ratio;
  report.worst_welfare_ratio = focal_ratio;

  const double r = std::sqrt(row.maxCoeff() / params.c);
  for (int x = 0; x < grid_points; ++x) {
    for (int y = 0; y < grid_points; ++y) {
      Vector dev(2);
      dev << -r + 2.0 * r * x / (grid_points - 1), -r + 2.0 * r * y / (grid_points - 1);
      double utility = 0.0;
      double ratio = 0.0;
      evaluate(dev, &utility, &ratio);
      report.worst_welfare_ratio = std::min(report.worst_welfare_ratio, ratio);
      if (utility - report.focal_utility > report.best_gain) {
        report.best_gain = utility - report.focal_utility;
        report.best_deviation = dev;
        report.welfare_ratio_at_best = ratio;
      }
    }
  }
  return report;
}

}  // namespace qtmlab
