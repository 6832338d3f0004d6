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

#include "qtmlab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include <Eigen/LU>

#include "qtmlab/error.hpp"
#include "qtmlab/generator.hpp"
#include "qtmlab/qtm.hpp"

namespace qtmlab {
namespace {

Vector SoftmaxOf(const Vector& a) { return Softmax(a).p(); }

// d F / d A for the aggregate map.
Matrix FocJacobian(const Vector& p, const Vector& welfare, double c) {
  const auto m = p.size();
  const double mean = p.dot(welfare);
  Matrix jac(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double kron = k == j ? 1.0 : 0.0;
      jac(k, j) = (p(k) * (kron - p(j)) * (welfare(k) - mean) -
                   p(k) * p(j) * (welfare(j) - mean)) /
                  (2.0 * c);
    }
  }
  return jac;
}

Vector Clamp(const Vector& a, double r) { return a.cwiseMax(-r).cwiseMin(r); }

Vector ProjectedGradient(const Vector& a, const Vector& g, double r) {
  Vector pg = g;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if ((a(k) >= r && g(k) > 0.0) || (a(k) <= -r && g(k) < 0.0)) pg(k) = 0.0;
  }
  return pg;
}

struct AscentResult {
  Vector votes;
  double utility;
  double stationarity;
  int iterations;
};

AscentResult LocalAscent(Vector a, const Vector& others,
                         const Eigen::Ref<const Eigen::RowVectorXd>& v,
                         double c, double r, double lipschitz,
                         const BestResponseOptions& options) {
  auto f = [&](const Vector& x) { return StrategicUtility(x.transpose(), others, v, c); };
  auto grad = [&](const Vector& x) {
    return StrategicGradient(x.transpose(), others, v, c);
  };

  a = Clamp(a, r);
  double fa = f(a);
  Vector g = grad(a);
  Vector pg = ProjectedGradient(a, g, r);
  int it = 0;
  for (; it < options.max_iter; ++it) {
    const double pg_norm = pg.lpNorm<Eigen::Infinity>();
    if (pg_norm <= options.tol) break;

    bool accepted = false;
    Vector next;
    const HessianReport hess = HessianAt(SoftmaxOf(others + a), v, c);
    if (hess.negative_definite) {
      const Vector dir = -hess.H.ldlt().solve(g);
      if (dir.allFinite()) {
        double t = 1.0;
        for (int ls = 0; ls < 30 && !accepted; ++ls, t *= 0.5) {
          next = Clamp(a + t * dir, r);
          const double fn = f(next);
          const bool armijo = fn >= fa + 1e-4 * g.dot(next - a);
          const bool stationarity_drop =
              ls == 0 && ProjectedGradient(next, grad(next), r)
                                 .lpNorm<Eigen::Infinity>() < 0.5 * pg_norm;
          accepted = (armijo && fn >= fa) || stationarity_drop;
        }
      }
    }
    if (!accepted) {
      double step = 1.0 / lipschitz;
      for (int ls = 0; ls < 60 && !accepted; ++ls, step *= 0.5) {
        next = Clamp(a + step * g, r);
        const double fn = f(next);
        accepted = fn > fa && fn >= fa + 1e-4 * g.dot(next - a);
      }
    }
    if (!accepted) break;
    a = std::move(next);
    fa = f(a);
    g = grad(a);
    pg = ProjectedGradient(a, g, r);
  }
  return {a, fa, pg.lpNorm<Eigen::Infinity>(), it};
}

EquilibriumSolution Certify(const ValueProfile& values,
                            const MechanismParams& params,
                            const FixedPointResult& fp,
                            const SolveOptions& options) {
  EquilibriumSolution sol;
  sol.aggregates = fp.aggregates;
  sol.p = fp.p;
  sol.iterations = fp.iterations;
  sol.votes = VotesFromAggregate(values, fp.p, params);
  const EquilibriumCheck check =
      VerifyEquilibrium(sol.votes, values, params, {}, options.compute_br_slack);
  sol.foc_residual = std::max(check.foc_residual, fp.residual);
  sol.br_slack = check.br_slack;
  sol.status = fp.status == SolveStatus::kConverged &&
                       sol.foc_residual <= options.fixed_point.tol
                   ? SolveStatus::kConverged
                   : SolveStatus::kMaxIterations;
  return sol;
}

}  // namespace

std::string_view SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxIterations:
      return "max-iterations";
    case SolveStatus::kNotApplicable:
      return "not-applicable";
  }
  return "not-applicable";
}

Vector FocMap(const Vector& aggregate_votes, const Vector& welfare, double c) {
  if (aggregate_votes.size() != welfare.size()) {
    ThrowInvalid("aggregate votes and welfare differ in length");
  }
  const Vector p = SoftmaxOf(aggregate_votes);
  const double mean = p.dot(welfare);
  return (p.array() * (welfare.array() - mean)).matrix() / (2.0 * c);
}

double FocResidual(const Vector& aggregate_votes, const Vector& welfare,
                   double c) {
  return (aggregate_votes - FocMap(aggregate_votes, welfare, c))
      .lpNorm<Eigen::Infinity>();
}

TwoAltSolution SolveTwoAlt(double v1, double v2, const MechanismParams& params,
                           double tol) {
  if (!(params.c > 0.0)) ThrowInvalid("c must be positive");
  if (!std::isfinite(v1) || !std::isfinite(v2)) {
    ThrowInvalid("aggregate values must be finite");
  }
  if (v1 < v2) {
    ThrowInvalid("two-alternative solver needs V1 >= V2 (canonical order)");
  }
  const double delta = v1 - v2;
  const double c = params.c;
  // f is strictly increasing with f(0) <= 0 <= f(delta / 8c) since
  // p1 p2 <= 1/4.
  auto f = [&](double a) {
    const double ch = std::cosh(a);
    return a - delta / (8.0 * c * ch * ch);
  };
  TwoAltSolution sol;
  double lo = 0.0;
  double hi = delta / (8.0 * c);
  if (delta == 0.0) {
    sol.residual = 0.0;
    return sol;
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    sol.iterations = it + 1;
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    (fm < 0.0 ? lo : hi) = mid;
  }
  const double flo = std::abs(f(lo));
  const double fhi = std::abs(f(hi));
  sol.a1 = flo <= fhi ? lo : hi;
  sol.residual = std::min(flo, fhi);
  sol.p1 = 1.0 / (1.0 + std::exp(-2.0 * sol.a1));
  if (sol.residual > tol) {
    throw Error(ErrorCode::kSolverFailure,
                "two-alternative bisection stalled with residual " +
                    std::to_string(sol.residual));
  }
  return sol;
}

FixedPointResult SolveFocFixedPoint(const Vector& welfare,
                                    const MechanismParams& params,
                                    const FixedPointOptions& options,
                                    const std::optional<Vector>& start) {
  if (!(params.c > 0.0)) ThrowInvalid("c must be positive");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    ThrowInvalid("damping must lie in (0, 1]");
  }
  if (!welfare.allFinite()) ThrowInvalid("welfare must be finite");
  const auto m = welfare.size();
  const double c = params.c;
  Vector a = start ? *start : Vector::Zero(m);
  if (a.size() != m) ThrowInvalid("fixed-point start has the wrong length");

  auto residual_of = [&](const Vector& x) {
    return (x - FocMap(x, welfare, c)).lpNorm<Eigen::Infinity>();
  };

  FixedPointResult result;
  double res = residual_of(a);
  int it = 0;
  for (; it < options.max_iter && res > options.tol; ++it) {
    const Vector gap = a - FocMap(a, welfare, c);
    bool moved = false;
    if (options.newton) {
      const Matrix sys = Matrix::Identity(m, m) -
                         FocJacobian(SoftmaxOf(a), welfare, c);
      const Vector dir = sys.fullPivLu().solve(-gap);
      if (dir.allFinite()) {
        double t = 1.0;
        for (int ls = 0; ls < 20; ++ls, t *= 0.5) {
          const Vector next = a + t * dir;
          const double next_res = residual_of(next);
          if (next_res < res) {
            a = next;
            res = next_res;
            moved = true;
            break;
          }
        }
      }
    }
    if (!moved) {
      double lambda = options.damping;
      Vector next = a - lambda * gap;
      double next_res = residual_of(next);
      for (int ls = 0; ls < 30 && next_res >= res; ++ls) {
        lambda *= 0.5;
        next = a - lambda * gap;
        next_res = residual_of(next);
      }
      a = std::move(next);
      res = next_res;
    }
  }
  result.aggregates = a;
  result.p = SoftmaxOf(a);
  result.residual = res;
  result.iterations = it;
  result.status = res <= options.tol ? SolveStatus::kConverged
                                     : SolveStatus::kMaxIterations;
  return result;
}

FixedPointResult SolveAggregateFoc(const Vector& welfare,
                                   const MechanismParams& params,
                                   const FixedPointOptions& options) {
  if (welfare.size() != 2) return SolveFocFixedPoint(welfare, params, options);
  const bool first_is_top = welfare(0) >= welfare(1);
  const double hi = first_is_top ? welfare(0) : welfare(1);
  const double lo = first_is_top ? welfare(1) : welfare(0);
  const TwoAltSolution two = SolveTwoAlt(hi, lo, params, options.tol);
  FixedPointResult result;
  result.aggregates.resize(2);
  result.aggregates << (first_is_top ? two.a1 : -two.a1),
      (first_is_top ? -two.a1 : two.a1);
  result.p = SoftmaxOf(result.aggregates);
  result.residual = FocResidual(result.aggregates, welfare, params.c);
  result.iterations = two.iterations;
  result.status = result.residual <= options.tol ? SolveStatus::kConverged
                                                 : SolveStatus::kMaxIterations;
  return result;
}

std::vector<FixedPointResult> SolveFocMultiStart(
    const Vector& welfare, const MechanismParams& params, int random_starts,
    std::uint64_t seed, const FixedPointOptions& options, double distinct_tol) {
  std::vector<FixedPointResult> found;
  auto add = [&](FixedPointResult r) {
    if (r.status != SolveStatus::kConverged) return;
    for (const auto& f : found) {
      if ((f.aggregates - r.aggregates).lpNorm<Eigen::Infinity>() <= distinct_tol) {
        return;
      }
    }
    found.push_back(std::move(r));
  };
  add(SolveFocFixedPoint(welfare, params, options));

  // |F_k(A)| <= (max W - min W) / (2c), so every fixed point lies in this box.
  const double radius =
      std::max(1e-3, (welfare.maxCoeff() - welfare.minCoeff()) / (2.0 * params.c));
  Rng rng = MakeRng(seed, 0xF0C);
  std::uniform_real_distribution<double> dist(-radius, radius);
  for (int s = 0; s < random_starts; ++s) {
    Vector start(welfare.size());
    for (Eigen::Index k = 0; k < start.size(); ++k) start(k) = dist(rng);
    add(SolveFocFixedPoint(welfare, params, options, start));
  }
  return found;
}

VoteProfile VotesFromAggregate(const ValueProfile& values, const Vector& p,
                               const MechanismParams& params) {
  if (p.size() != static_cast<Eigen::Index>(values.alternatives())) {
    ThrowInvalid("outcome length does not match alternatives");
  }
  const Matrix& v = values.values();
  const Vector expected = v * p;  // E_p v^i per agent
  Matrix votes = v;
  votes.colwise() -= expected;
  votes = votes * p.asDiagonal() / (2.0 * params.c);
  return VoteProfile(std::move(votes));
}

BestResponseResult BestResponse(const Vector& others,
                                const Eigen::Ref<const Eigen::RowVectorXd>& agent_values,
                                const MechanismParams& params,
                                const BestResponseOptions& options,
                                const std::optional<Vector>& warm_start) {
  const auto m = others.size();
  if (agent_values.size() != m) {
    ThrowInvalid("agent values and aggregate differ in length");
  }
  const double c = params.c;
  const double vmax = agent_values.maxCoeff();
  const double r = std::sqrt(vmax / c);
  const bool concave = c >= 0.5 * vmax;
  const double lipschitz = 2.0 * c + 2.0 * vmax;

  BestResponseResult best;
  best.heuristic = !concave;
  if (r == 0.0) {
    best.votes = Vector::Zero(m);
    best.utility = StrategicUtility(best.votes.transpose(), others, agent_values, c);
    return best;
  }

  std::vector<Vector> starts;
  starts.push_back(warm_start ? *warm_start : Vector::Zero(m));
  if (!concave) {
    starts.push_back(Vector::Zero(m));
    Rng rng = MakeRng(options.seed, 0xB2);
    std::uniform_real_distribution<double> dist(-r, r);
    for (int s = 0; s < options.restarts; ++s) {
      Vector x(m);
      for (Eigen::Index k = 0; k < m; ++k) x(k) = dist(rng);
      starts.push_back(std::move(x));
    }
  }

  bool have = false;
  for (const Vector& s : starts) {
    AscentResult local = LocalAscent(s, others, agent_values, c, r, lipschitz, options);
    best.iterations += local.iterations;
    if (!have || local.utility > best.utility) {
      have = true;
      best.votes = std::move(local.votes);
      best.utility = local.utility;
      best.stationarity = local.stationarity;
    }
  }
  best.on_boundary = (best.votes.cwiseAbs().array() >= r).any();
  return best;
}

double AgentFocResidual(const VoteProfile& votes, const ValueProfile& values,
                        const MechanismParams& params,
                        const std::optional<Vector>& offset) {
  Vector total = votes.Aggregates();
  if (offset) total += *offset;
  const Vector p = SoftmaxOf(total);
  const VoteProfile expected = VotesFromAggregate(values, p, params);
  return (votes.votes() - expected.votes()).lpNorm<Eigen::Infinity>();
}

EquilibriumCheck VerifyEquilibrium(const VoteProfile& votes,
                                   const ValueProfile& values,
                                   const MechanismParams& params,
                                   const std::optional<Vector>& offset,
                                   bool compute_br_slack) {
  if (votes.agents() != values.agents() ||
      votes.alternatives() != values.alternatives()) {
    ThrowInvalid("vote and value profiles differ in shape");
  }
  Vector total = votes.Aggregates();
  if (offset) total += *offset;
  const Vector p = SoftmaxOf(total);

  EquilibriumCheck check;
  const VoteProfile expected = VotesFromAggregate(values, p, params);
  check.foc_residual = (votes.votes() - expected.votes()).lpNorm<Eigen::Infinity>();
  const double mean = p.dot(values.aggregates());
  const Vector aggregate_rhs =
      (p.array() * (values.aggregates().array() - mean)).matrix() /
      (2.0 * params.c);
  check.foc_residual = std::max(
      check.foc_residual,
      (votes.Aggregates() - aggregate_rhs).lpNorm<Eigen::Infinity>());

  if (compute_br_slack) {
    double slack = 0.0;
    for (std::size_t i = 0; i < votes.agents(); ++i) {
      const Vector own = votes.agent(i).transpose();
      const Vector others = total - own;
      const double current =
          StrategicUtility(own.transpose(), others, values.agent(i), params.c);
      const BestResponseResult br =
          BestResponse(others, values.agent(i), params, {}, own);
      slack = std::max(slack, br.utility - current);
    }
    check.br_slack = slack;
  }
  return check;
}

EquilibriumSolution SolveEquilibrium(const ValueProfile& values,
                                     const MechanismParams& params,
                                     const SolveOptions& options) {
  const FixedPointResult fp =
      SolveAggregateFoc(values.aggregates(), params, options.fixed_point);
  return Certify(values, params, fp, options);
}

std::vector<EquilibriumSolution> SolveEquilibria(const ValueProfile& values,
                                                 const MechanismParams& params,
                                                 int random_starts,
                                                 std::uint64_t seed,
                                                 const SolveOptions& options) {
  std::vector<EquilibriumSolution> out;
  if (values.alternatives() == 2) {
    out.push_back(SolveEquilibrium(values, params, options));
    return out;
  }
  for (const FixedPointResult& fp :
       SolveFocMultiStart(values.aggregates(), params, random_starts, seed,
                          options.fixed_point)) {
    out.push_back(Certify(values, params, fp, options));
  }
  return out;
}

DynamicsTrace BestResponseDynamics(const ValueProfile& values,
                                   const MechanismParams& params,
                                   const VoteProfile& init, int rounds,
                                   const BestResponseOptions& options) {
  if (init.agents() != values.agents() ||
      init.alternatives() != values.alternatives()) {
    ThrowInvalid("initial votes do not match the value profile");
  }
  DynamicsTrace trace;
  Matrix votes = init.votes();
  Vector total = votes.colwise().sum().transpose();
  for (int round = 0; round < rounds; ++round) {
    for (Eigen::Index i = 0; i < votes.rows(); ++i) {
      const Vector own = votes.row(i).transpose();
      const Vector others = total - own;
      const BestResponseResult br = BestResponse(
          others, values.agent(static_cast<std::size_t>(i)), params, options, own);
      total += br.votes - own;
      votes.row(i) = br.votes.transpose();
    }
    total = votes.colwise().sum().transpose();
    VoteProfile state(votes);
    trace.residuals.push_back(AgentFocResidual(state, values, params));
    trace.trajectory.push_back(std::move(state));
  }
  return trace;
}

}  // namespace qtmlab
