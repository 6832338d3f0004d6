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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "qtmlab/equilibrium.hpp"
#include "qtmlab/error.hpp"
#include "qtmlab/generator.hpp"
#include "qtmlab/qtm.hpp"

namespace qtmlab {
namespace {

Vector Vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

// Independent long-double root of A = d / (2c (e^A + e^-A)^2) by regula
// falsi (Illinois) on [0, d / (8c)].
long double TwoAltOracle(long double d, long double c) {
  auto f = [&](long double a) {
    const long double s = std::exp(a) + std::exp(-a);
    return a - d / (2.0L * c * s * s);
  };
  long double lo = 0.0L, hi = d / (8.0L * c);
  long double flo = f(lo), fhi = f(hi);
  if (flo == 0.0L) return lo;
  int side = 0;
  for (int it = 0; it < 500; ++it) {
    const long double x = (lo * fhi - hi * flo) / (fhi - flo);
    const long double fx = f(x);
    if (fx == 0.0L || hi - lo < 1e-18L) return x;
    if ((fx > 0) == (fhi > 0)) {
      hi = x;
      fhi = fx;
      if (side == -1) flo /= 2;
      side = -1;
    } else {
      lo = x;
      flo = fx;
      if (side == 1) fhi /= 2;
      side = 1;
    }
  }
  return (lo + hi) / 2;
}

TEST(SolveTwoAltTest, EqualTotalsGiveZero) {
  const TwoAltSolution s = SolveTwoAlt(3.0, 3.0, MechanismParams::Create(0.5));
  EXPECT_EQ(s.a1, 0.0);
  EXPECT_EQ(s.p1, 0.5);
}

TEST(SolveTwoAltTest, DerivedExample) {
  const TwoAltSolution s = SolveTwoAlt(10.0, 0.0, MechanismParams::Create(0.5));
  const double oracle = static_cast<double>(TwoAltOracle(10.0L, 0.5L));
  EXPECT_NEAR(s.a1, oracle, 1e-10);
  // The root is 1.01932...; the commonly quoted 1.0185 is a loose rounding.
  EXPECT_NEAR(s.a1, 1.0193, 5e-5);
  EXPECT_NEAR(s.p1, 0.885, 5e-4);
  EXPECT_LE(s.residual, 1e-12);
  EXPECT_GE(s.p1, 1.0 - std::pow(0.4, 2.0 / 3.0));
}

TEST(SolveTwoAltTest, RejectsWrongOrder) {
  EXPECT_THROW(SolveTwoAlt(0.0, 1.0, MechanismParams::Create(1.0)), Error);
}

TEST(SolveTwoAltTest, MatchesOracleAcrossScales) {
  Rng rng = MakeRng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double c = 0.05 + u(rng);
    const double d = std::pow(10.0, 4.0 * u(rng) - 1.0);
    const TwoAltSolution s = SolveTwoAlt(d, 0.0, MechanismParams::Create(c));
    EXPECT_NEAR(s.a1, static_cast<double>(TwoAltOracle(d, c)), 1e-9 * (1.0 + s.a1));
    EXPECT_GT(s.p1, 0.5);
    // Additive-gap floor.
    EXPECT_GE(s.p1, 1.0 - std::pow(8.0 * c / d, 2.0 / 3.0) - 1e-12);
  }
}

TEST(FixedPointTest, SymmetricGivesZero) {
  const FixedPointResult r = SolveFocFixedPoint(Vec({2.0, 2.0, 2.0}), MechanismParams::Create(1.0));
  EXPECT_EQ(r.status, SolveStatus::kConverged);
  EXPECT_LE(r.aggregates.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FixedPointTest, AgreesWithTwoAltSolver) {
  Rng rng = MakeRng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double c = 0.1 + u(rng);
    const double v1 = 20.0 * u(rng);
    const double v2 = v1 * u(rng);
    const FixedPointResult fp = SolveFocFixedPoint(Vec({v1, v2}), MechanismParams::Create(c));
    ASSERT_EQ(fp.status, SolveStatus::kConverged);
    const TwoAltSolution s = SolveTwoAlt(v1, v2, MechanismParams::Create(c));
    EXPECT_NEAR(fp.aggregates(0), s.a1, 1e-9);
    EXPECT_NEAR(fp.aggregates(1), -s.a1, 1e-9);
  }
}

TEST(FixedPointTest, ThreeAlternatives) {
  const FixedPointResult r = SolveFocFixedPoint(Vec({3.0, 2.0, 1.0}), MechanismParams::Create(0.5));
  ASSERT_EQ(r.status, SolveStatus::kConverged);
  EXPECT_NEAR(r.aggregates.sum(), 0.0, 1e-9);
  EXPECT_LT(FocResidual(r.aggregates, Vec({3.0, 2.0, 1.0}), 0.5), 1e-10);
  EXPECT_GT(r.p(0), r.p(1));
  EXPECT_GT(r.p(1), r.p(2));
}

TEST(FixedPointTest, MaxIterationsIsReported) {
  FixedPointOptions opts;
  opts.max_iter = 1;
  opts.newton = false;
  opts.tol = 1e-15;
  const FixedPointResult r = SolveFocFixedPoint(Vec({30.0, 2.0, 1.0}), MechanismParams::Create(0.5), opts);
  EXPECT_EQ(r.status, SolveStatus::kMaxIterations);
}

TEST(VotesFromAggregateTest, EqualValuesGiveZeroRow) {
  const ValueProfile v(Matrix{{2.0, 2.0}, {1.0, 0.0}});
  const VoteProfile a = VotesFromAggregate(v, Vec({0.7, 0.3}), MechanismParams::Create(1.0));
  EXPECT_EQ(a.agent(0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(VotesFromAggregateTest, SingleAgentReproducesAggregate) {
  const ValueProfile v(Matrix{{4.0, 1.0, 0.0}});
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  const FixedPointResult r = SolveFocFixedPoint(v.aggregates(), params);
  ASSERT_EQ(r.status, SolveStatus::kConverged);
  const VoteProfile a = VotesFromAggregate(v, r.p, params);
  EXPECT_LE((a.agent(0).transpose() - r.aggregates).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(VotesFromAggregateTest, RowsSumToZeroInsideBox) {
  Rng rng = MakeRng(23);
  GeneratorSpec spec;
  spec.n = 9;
  for (std::size_t m : {2u, 3u, 6u}) {
    spec.m = m;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const ValueProfile v = GenerateInstance(spec, seed);
      std::uniform_real_distribution<double> u(0.01, 1.0);
      Vector p(static_cast<Eigen::Index>(m));
      for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = u(rng);
      p /= p.sum();
      const MechanismParams params = MechanismParams::Create(0.2 + u(rng), v);
      const VoteProfile a = VotesFromAggregate(v, p, params);
      const Vector box = DominatedBox(v, params);
      for (std::size_t i = 0; i < 9; ++i) {
        EXPECT_NEAR(a.agent(i).sum(), 0.0, 1e-12);
        EXPECT_LE(a.agent(i).cwiseAbs().maxCoeff(), box(static_cast<Eigen::Index>(i)));
      }
    }
  }
}

TEST(BestResponseTest, ZeroValuesGiveZero) {
  const Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(3);
  const BestResponseResult r = BestResponse(Vec({1.0, -2.0, 0.5}), v, MechanismParams::Create(1.0));
  EXPECT_LE(r.votes.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BestResponseTest, RecoversFocVotes) {
  GeneratorSpec spec;
  spec.n = 6;
  for (std::size_t m : {2u, 4u}) {
    spec.m = m;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const ValueProfile v = GenerateInstance(spec, seed);
      const MechanismParams params = MechanismParams::HalfMaxValue(v);
      const EquilibriumSolution eq = SolveEquilibrium(v, params);
      ASSERT_EQ(eq.status, SolveStatus::kConverged);
      for (std::size_t i = 0; i < 6; ++i) {
        const Vector others = eq.aggregates - eq.votes.agent(i).transpose();
        const BestResponseResult r = BestResponse(others, v.agent(i), params);
        EXPECT_FALSE(r.heuristic);
        EXPECT_LE((r.votes - eq.votes.agent(i).transpose()).cwiseAbs().maxCoeff(), 1e-8);
      }
    }
  }
}

TEST(BestResponseTest, BeatsRandomProbes) {
  Rng rng = MakeRng(24);
  GeneratorSpec spec;
  spec.n = 1;
  spec.m = 3;
  const ValueProfile v = GenerateInstance(spec, 5);
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  const Vector others = Vec({0.3, -1.2, 0.4});
  const BestResponseResult r = BestResponse(others, v.agent(0), params);
  const double best = StrategicUtility(r.votes.transpose(), others, v.agent(0), params.c);
  EXPECT_NEAR(best, r.utility, 1e-12);
  const double box = DominatedBox(v, params)(0);
  std::uniform_real_distribution<double> u(-box, box);
  for (int probe = 0; probe < 10000; ++probe) {
    Eigen::RowVectorXd a(3);
    for (Eigen::Index k = 0; k < 3; ++k) a(k) = u(rng);
    EXPECT_GE(best + 1e-12, StrategicUtility(a, others, v.agent(0), params.c));
  }
}

TEST(BestResponseTest, NonconcaveRegimeIsHeuristic) {
  const Eigen::RowVectorXd v = (Eigen::RowVectorXd(2) << 10.0, 0.0).finished();
  const BestResponseResult r = BestResponse(Vec({0.0, 0.0}), v, MechanismParams::Create(0.5));
  EXPECT_TRUE(r.heuristic);
}

TEST(VerifyTest, SolvedInstanceCertifies) {
  GeneratorSpec spec;
  spec.n = 8;
  const ValueProfile v = GenerateInstance(spec, 3);
  const EquilibriumSolution eq = SolveEquilibrium(v, MechanismParams::HalfMaxValue(v));
  EXPECT_EQ(eq.status, SolveStatus::kConverged);
  EXPECT_LE(eq.foc_residual, 1e-10);
  EXPECT_LE(eq.br_slack, 1e-6);
  EXPECT_LE((Softmax(eq.aggregates).p() - eq.p).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(eq.aggregates.sum(), 0.0, 1e-9);
}

TEST(VerifyTest, PerturbationIsDetected) {
  GeneratorSpec spec;
  spec.n = 5;
  const ValueProfile v = GenerateInstance(spec, 4);
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  const EquilibriumSolution eq = SolveEquilibrium(v, params);
  VoteProfile a = eq.votes;
  a.mutable_votes()(2, 0) += 0.1;
  const EquilibriumCheck check = VerifyEquilibrium(a, v, params);
  EXPECT_GT(check.foc_residual, 0.0);
  EXPECT_GT(check.br_slack, 0.0);
  EXPECT_FALSE(check.Certified(1e-8));
}

TEST(VerifyTest, ZeroVotesOnAsymmetricInstance) {
  const ValueProfile v(Matrix{{1.0, 0.0}, {0.5, 0.0}});
  const EquilibriumCheck check =
      VerifyEquilibrium(VoteProfile::Zero(2, 2), v, MechanismParams::HalfMaxValue(v));
  EXPECT_GT(check.br_slack, 0.0);
}

TEST(DynamicsTest, FixedPointStaysPut) {
  GeneratorSpec spec;
  spec.n = 4;
  const ValueProfile v = GenerateInstance(spec, 6);
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  const EquilibriumSolution eq = SolveEquilibrium(v, params);
  const DynamicsTrace t = BestResponseDynamics(v, params, eq.votes, 5);
  for (double r : t.residuals) EXPECT_LE(r, 1e-8);
}

TEST(DynamicsTest, SymmetricZeroStaysZero) {
  const ValueProfile v(Matrix{{1.0, 1.0}, {0.5, 0.5}});
  const DynamicsTrace t =
      BestResponseDynamics(v, MechanismParams::HalfMaxValue(v), VoteProfile::Zero(2, 2), 3);
  for (const VoteProfile& a : t.trajectory) EXPECT_LE(a.votes().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DynamicsTest, ConvergesOnMostTwoAltInstances) {
  GeneratorSpec spec;
  spec.n = 5;
  int converged = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ValueProfile v = GenerateInstance(spec, seed);
    const DynamicsTrace t = BestResponseDynamics(v, MechanismParams::HalfMaxValue(v),
                                                 VoteProfile::Zero(5, 2), 200);
    if (std::any_of(t.residuals.begin(), t.residuals.end(), [](double r) { return r < 1e-8; })) {
      ++converged;
    }
  }
  EXPECT_GE(converged, 95);
}

TEST(SolveEquilibriumTest, RelabelingInvariant) {
  GeneratorSpec spec;
  spec.n = 7;
  spec.m = 4;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ValueProfile v = GenerateInstance(spec, seed);
    std::vector<std::size_t> perm(4);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng = MakeRng(seed, 5);
    std::shuffle(perm.begin(), perm.end(), rng);
    const MechanismParams params = MechanismParams::HalfMaxValue(v);
    const EquilibriumSolution a = SolveEquilibrium(v, params);
    const EquilibriumSolution b = SolveEquilibrium(v.Reindexed(perm), params);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(b.aggregates(static_cast<Eigen::Index>(k)),
                  a.aggregates(static_cast<Eigen::Index>(perm[k])), 1e-10);
    }
  }
}

TEST(SolveEquilibriumTest, TwoAltPropertiesHold) {
  GeneratorSpec spec;
  spec.n = 10;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ValueProfile v = GenerateInstance(spec, seed);
    const MechanismParams params = MechanismParams::HalfMaxValue(v);
    const EquilibriumSolution eq = SolveEquilibrium(v, params);
    ASSERT_EQ(eq.status, SolveStatus::kConverged);
    const auto top = static_cast<Eigen::Index>(v.canonical_order()[0]);
    const double d = v.aggregates().maxCoeff() - v.aggregates().minCoeff();
    if (d <= 0.0) continue;
    EXPECT_GT(eq.p(top), 0.5);
    EXPECT_GE(eq.p(top), 1.0 - std::pow(8.0 * params.c / d, 2.0 / 3.0) - 1e-12);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(eq.votes.agent(i).sum(), 0.0, 1e-9);
  }
}

TEST(MultiStartTest, FirstSolutionIsFromZero) {
  const Vector w = Vec({3.0, 2.0, 1.0});
  const MechanismParams params = MechanismParams::Create(1.5);
  const auto all = SolveFocMultiStart(w, params, 6, 1);
  ASSERT_FALSE(all.empty());
  const FixedPointResult zero = SolveFocFixedPoint(w, params);
  EXPECT_LE((all[0].aggregates - zero.aggregates).cwiseAbs().maxCoeff(), 1e-8);
}

}  // namespace
}  // namespace qtmlab
