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

#ifndef QTMLAB_SQUAP_HPP_
#define QTMLAB_SQUAP_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qtmlab/aggregation.hpp"
#include "qtmlab/analysis.hpp"
#include "qtmlab/qtm.hpp"
#include "qtmlab/synthetic.hpp"
#include "qtmlab/types.hpp"

namespace qtmlab {

// Two-stage mechanism: an aggregation stage elicits Bhat, then the
// synthetic-players QTM decides with it, then the aggregation stage settles.

enum class AggregationKind { kMarket, kWagering };

std::string_view AggregationKindName(AggregationKind kind);
AggregationKind ParseAggregationKind(std::string_view name);

struct SquapConfig {
  AggregationKind kind = AggregationKind::kMarket;
  // beta = epsilon * x with x the largest agent value.
  double epsilon = 1.0;
  // Defaults to x / 2.
  std::optional<double> c;
  bool redistribute = false;
  std::uint64_t seed = 0;
  // One agent trades last (market) or forecasts (wagering) with a stake in
  // the decision. Index defaults to the agent with the widest value range.
  bool manipulate = false;
  std::optional<std::size_t> manipulator;
  // Market prior B^0; zero when absent.
  std::optional<Vector> initial;
  // Wagering forecasters N (the manipulator is one of them).
  std::size_t forecasters = 2;
  // Outcome noise Var(b*_k); zero when empty.
  Vector outcome_variance;
  Weighting weighting = Weighting::kImportance;
  // Practical variant only: grid points per axis for the deviation scan
  // (0 disables it).
  int manipulation_grid = 0;
};

struct SquapRun {
  SquapConfig config;
  bool practical = false;
  double x = 0.0;      // max agent value
  double beta = 0.0;
  double c = 0.0;
  double alpha = 0.0;  // sqrt(epsilon)

  Vector truth;   // B
  Vector bhat;    // elicited estimates
  std::size_t manipulator = 0;
  bool aggregation_converged = true;
  // Market: initial estimate followed by every trade. Wagering: one row per
  // forecaster.
  std::vector<Vector> predictions;

  Vector aggregates;  // committed A (impractical) or realised totals
  Vector a_mech;
  Vector p;           // decision distribution p'
  VoteProfile votes = VoteProfile::Zero(0, 0);
  PaymentReport payments;
  std::size_t chosen = 0;
  double bstar = 0.0;
  Vector aggregation_payoffs;

  double welfare = 0.0;          // sum_k p'_k W_k with the true B
  double optimal_welfare = 0.0;  // W_1
  double spread = 0.0;           // W_1 / x
  double deviation = 0.0;        // max_k |Bhat_k - B_k|
  double independence_spread = 0.0;
  double max_zero_vote_loss = 0.0;

  std::optional<ManipulationReport> manipulation;
  std::vector<BoundReport> bounds;
  bool certified = false;
};

// Impractical variant: the mechanism commits to synthetic votes computed from
// the value totals, agents play the announced focal votes, redistribution is
// off unless the config enables it (which voids certification). Stage errors
// carry the tags "aggregation", "commit", "decision" and "settlement".
SquapRun RunImpracticalSquap(const ValueProfile& values, const Vector& truth,
                             const SquapConfig& config);

// Practical variant (m = 2): the decision comes from the fixed point on the
// submitted vote sums. Always uncertified.
SquapRun RunPracticalSquap(const ValueProfile& values, const Vector& truth,
                           const SquapConfig& config);

// max_k |Bhat_k - B_k| <= alpha x, with relative slack 1e-12.
bool AccuracyBoundCheck(const SquapRun& run, double alpha, double x);

struct SelfFunding {
  double expected_revenue = 0.0;
  double expected_market_spend = 0.0;
  double spend_bound = 0.0;  // (1/beta) sum_k (B^0_k - B_k)^2, averaged
  bool feasible = false;
};

// Averages over runs of the decision-stage revenue and the market's expected
// spend (1/beta)[|B^0 - B|^2 - |Bhat - B|^2]. Requires market runs that
// all used `beta`.
SelfFunding SelfFundingCheck(const std::vector<SquapRun>& runs, double beta);

}  // namespace qtmlab

#endif  // QTMLAB_SQUAP_HPP_
