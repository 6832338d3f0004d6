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

#include <cmath>

#include <gtest/gtest.h>

#include "qtmlab/analysis.hpp"
#include "qtmlab/equilibrium.hpp"
#include "qtmlab/error.hpp"
#include "qtmlab/generator.hpp"
#include "qtmlab/qtm.hpp"
#include "qtmlab/stats.hpp"
#include "qtmlab/synthetic.hpp"

namespace qtmlab {
namespace {

Vector Vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST(CommitTest, ZeroEstimatesReduceToQtm) {
  GeneratorSpec spec;
  spec.n = 6;
  spec.m = 3;
  const ValueProfile v = GenerateInstance(spec, 1);
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  const SyntheticCommitment c = Commit(v.aggregates(), Vector::Zero(3), params);
  EXPECT_EQ(c.a_mech.cwiseAbs().maxCoeff(), 0.0);
  const FixedPointResult plain = SolveAggregateFoc(v.aggregates(), params);
  EXPECT_LE((c.aggregates - plain.aggregates).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CommitTest, PureSyntheticStake) {
  const MechanismParams params = MechanismParams::Create(0.5);
  const SyntheticCommitment c = Commit(Vec({0.0, 0.0}), Vec({10.0, 0.0}), params);
  const TwoAltSolution s = SolveTwoAlt(10.0, 0.0, params);
  EXPECT_NEAR(c.a_mech(0), s.a1, 1e-10);
  EXPECT_NEAR(c.aggregates(0), s.a1, 1e-10);
  EXPECT_NEAR(c.a_mech(0), 1.0193, 5e-5);
  EXPECT_NEAR(c.a_mech(0), -c.a_mech(1), 1e-14);
}

TEST(CommitTest, SyntheticVotesSumToZero) {
  GeneratorSpec spec;
  spec.n = 5;
  Rng rng = MakeRng(31);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (std::size_t m : {2u, 3u, 5u}) {
    spec.m = m;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const ValueProfile v = GenerateInstance(spec, seed);
      Vector bhat(static_cast<Eigen::Index>(m));
      for (Eigen::Index k = 0; k < bhat.size(); ++k) bhat(k) = u(rng);
      const MechanismParams params = MechanismParams::HalfMaxValue(v);
      const SyntheticCommitment c = Commit(v.aggregates(), bhat, params);
      EXPECT_NEAR(c.a_mech.sum(), 0.0, 1e-10);
      EXPECT_LE(FocResidual(c.aggregates, v.aggregates() + bhat, params.c), 1e-10);
      // Synthetic first-order condition.
      const double mean = c.p.dot(bhat);
      for (Eigen::Index k = 0; k < bhat.size(); ++k) {
        EXPECT_NEAR(c.a_mech(k), c.p(k) / (2.0 * params.c) * (bhat(k) - mean), 1e-12);
      }
    }
  }
}

TEST(CommitTest, UnscaledReadingSolvesWithHalfCost) {
  SyntheticOptions opts;
  opts.scaled_by_cost = false;
  const SyntheticCommitment a = Commit(Vec({2.0, 1.0}), Vec({3.0, 0.0}), MechanismParams::Create(2.0), opts);
  const SyntheticCommitment b = Commit(Vec({2.0, 1.0}), Vec({3.0, 0.0}), MechanismParams::Create(0.5));
  EXPECT_DOUBLE_EQ(a.c, 0.5);
  EXPECT_LE((a.aggregates - b.aggregates).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RunImpracticalTest, FocalVotesReproduceCommitment) {
  GeneratorSpec spec;
  spec.n = 8;
  Rng rng = MakeRng(32);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (std::size_t m : {2u, 4u}) {
    spec.m = m;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const ValueProfile v = GenerateInstance(spec, seed);
      Vector bhat(static_cast<Eigen::Index>(m));
      for (Eigen::Index k = 0; k < bhat.size(); ++k) bhat(k) = u(rng);
      const MechanismParams params = MechanismParams::HalfMaxValue(v);
      const SyntheticCommitment c = Commit(v.aggregates(), bhat, params);
      const VoteProfile a = FocalVotes(v, c, params);
      const ImpracticalResult r = RunImpractical(c, a, params, false);
      EXPECT_LE((r.outcome.p() - c.p).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_EQ(r.payments.rebate.cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(RunImpracticalTest, ZeroEverythingIsUniform) {
  SyntheticCommitment c;
  c.aggregates = Vector::Zero(3);
  c.a_mech = Vector::Zero(3);
  c.p = Vector::Constant(3, 1.0 / 3.0);
  c.welfare = Vector::Zero(3);
  c.c = 1.0;
  const ImpracticalResult r =
      RunImpractical(c, VoteProfile::Zero(2, 3), MechanismParams::Create(1.0), false);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(r.outcome[k], 1.0 / 3.0, 1e-15);
}

TEST(RunImpracticalTest, ShiftingSyntheticVotesIsHarmless) {
  GeneratorSpec spec;
  spec.n = 4;
  spec.m = 3;
  const ValueProfile v = GenerateInstance(spec, 2);
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  SyntheticCommitment c = Commit(v.aggregates(), Vec({1.0, 0.0, 2.0}), params);
  const VoteProfile a = FocalVotes(v, c, params);
  const Vector before = RunImpractical(c, a, params, false).outcome.p();
  c.a_mech.array() += 3.7;
  EXPECT_LE((RunImpractical(c, a, params, false).outcome.p() - before).cwiseAbs().maxCoeff(),
            1e-12);
}

// With no external estimates the pipeline is the plain QTM, transfers included.
TEST(RunImpracticalTest, ZeroEstimatesMatchQtmExactly) {
  GeneratorSpec spec;
  spec.n = 5;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ValueProfile v = GenerateInstance(spec, seed);
    const MechanismParams params = MechanismParams::HalfMaxValue(v);
    const SyntheticCommitment c = Commit(v.aggregates(), Vector::Zero(2), params);
    const ImpracticalResult r = RunImpractical(c, FocalVotes(v, c, params), params, true);
    const EquilibriumSolution eq = SolveEquilibrium(v, params, {{}, false});
    const PaymentReport qtm = Settle(eq.votes, params, true);
    EXPECT_LE((r.outcome.p() - eq.p).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((r.payments.net - qtm.net).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PracticalTest, EqualEstimatesCancel) {
  const PracticalTwoAltResult r =
      SolvePracticalTwoAlt(Vec({1.5, 0.5}), Vec({4.0, 4.0}), MechanismParams::Create(0.5));
  EXPECT_NEAR(r.p1, Sigmoid(1.0), 1e-13);
}

TEST(PracticalTest, ZeroVotesMatchCommitment) {
  const MechanismParams params = MechanismParams::Create(0.5);
  const PracticalTwoAltResult r = SolvePracticalTwoAlt(Vec({0.0, 0.0}), Vec({10.0, 0.0}), params);
  const SyntheticCommitment c = Commit(Vec({0.0, 0.0}), Vec({10.0, 0.0}), params);
  EXPECT_NEAR(r.p1, c.p(0), 1e-12);
  EXPECT_NEAR(r.p1, 0.885, 5e-4);
  EXPECT_NEAR(r.p1, Sigmoid(20.0 * r.p1 * (1.0 - r.p1)), 1e-13);
}

TEST(PracticalTest, MatchesGridScan) {
  const double c = 0.5;
  const PracticalTwoAltResult r =
      SolvePracticalTwoAlt(Vec({5.0, 0.0}), Vec({0.0, 5.0}), MechanismParams::Create(c));
  auto residual = [&](double p) { return Sigmoid(5.0 - p * (1.0 - p) * 5.0 / c) - p; };
  int roots = 0;
  double root = -1.0;
  double prev = residual(1e-6);
  for (int i = 2; i < 1000000; ++i) {
    const double p = i * 1e-6;
    const double cur = residual(p);
    if ((prev > 0) != (cur > 0)) {
      ++roots;
      root = p;
    }
    prev = cur;
  }
  ASSERT_EQ(roots, 1);
  EXPECT_NEAR(r.p1, root, 1e-6);
  EXPECT_LE(r.residual, 1e-13);
}

TEST(OracleTest, NoExternalIsPlainQtm) {
  GeneratorSpec spec;
  spec.n = 4;
  const ValueProfile v = GenerateInstance(spec, 3);
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  const EquilibriumSolution a = SyntheticGameOracle(v, Vector::Zero(2), params);
  const EquilibriumSolution b = SolveEquilibrium(v, params);
  EXPECT_LE((a.p - b.p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OracleTest, RejectsTooFewPlayers) {
  const ValueProfile v(Matrix{{1.0, 0.0}});
  const MechanismParams params = MechanismParams::Create(0.5);
  EXPECT_EQ(DefaultSyntheticPlayers(Vec({10.0, 0.0}), params), 11u);
  EXPECT_THROW(SyntheticGameOracle(v, Vec({10.0, 0.0}), params, 9), Error);
}

TEST(OracleTest, EquivalentToCommitment) {
  GeneratorSpec spec;
  spec.n = 6;
  Rng rng = MakeRng(33);
  std::uniform_real_distribution<double> u(0.0, 6.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ValueProfile v = GenerateInstance(spec, seed);
    const Vector b = Vec({u(rng), u(rng)});
    const MechanismParams params = MechanismParams::HalfMaxValue(v);
    const SyntheticCommitment c = Commit(v.aggregates(), b, params);
    const EquilibriumSolution oracle = SyntheticGameOracle(v, b, params);
    EXPECT_LE((oracle.p - c.p).cwiseAbs().maxCoeff(), 1e-9);
    const ImpracticalResult r = RunImpractical(c, FocalVotes(v, c, params), params, false);
    EXPECT_LE((oracle.p - r.outcome.p()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(OracleTest, FocalWelfareMeetsSpreadBound) {
  GeneratorSpec spec;
  spec.n = 6;
  Rng rng = MakeRng(34);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ValueProfile v = GenerateInstance(spec, seed);
    const ExternalWelfare ext = ExternalWelfare::Truthful(Vec({u(rng), u(rng)}));
    const MechanismParams params = MechanismParams::HalfMaxValue(v);
    const SyntheticCommitment c = Commit(v.aggregates(), ext.B, params);
    const InstanceStats s = ComputeStats(v, ext);
    const double w1 = s.welfare(0);
    EXPECT_GE(Welfare(SoftmaxOutcome(c.p), v, ext), w1 * BoundSpread(s.spread) - 1e-9);
  }
}

TEST(ManipulationTest, ReportsMeasurementsOnly) {
  const ValueProfile v(Matrix{{1.0, 0.0}, {0.0, 1.0}, {0.6, 0.2}});
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  const ManipulationReport r =
      PracticalManipulationExperiment(v, Vec({3.0, 0.0}), Vec({3.0, 0.0}), params, 1, 11);
  EXPECT_GE(r.best_gain, 0.0);
  EXPECT_LE(r.worst_welfare_ratio, r.welfare_ratio_at_best + 1e-15);
  EXPECT_GT(r.worst_welfare_ratio, 0.0);
  EXPECT_LE(r.welfare_ratio_at_best, 1.0);
}

}  // namespace
}  // namespace qtmlab
