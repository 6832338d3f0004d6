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

#include "qtmlab/squap.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qtmlab/error.hpp"
#include "qtmlab/generator.hpp"

namespace qtmlab {
namespace {

constexpr std::uint64_t kManipulatorStream = 0xA11;
constexpr std::uint64_t kSettlementStream = 0x5E7;

template <typename F>
auto Staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.stage().empty()) throw e.WithStage(stage);
    throw;
  }
}

std::size_t WidestRange(const ValueProfile& values) {
  std::size_t best = 0;
  double width = -1.0;
  for (std::size_t i = 0; i < values.agents(); ++i) {
    const auto row = values.agent(i);
    const double w = row.maxCoeff() - row.minCoeff();
    if (w > width) {
      width = w;
      best = i;
    }
  }
  return best;
}

// Agent i's focal decision-stage utility when the mechanism commits on bhat.
double FocalUtility(const ValueProfile& values, std::size_t i, const Vector& bhat,
                    const MechanismParams& params) {
  const SyntheticCommitment cm = Commit(values.aggregates(), bhat, params);
  const Vector v = values.agent(i).transpose();
  const double ev = cm.p.dot(v);
  const Vector a = (cm.p.array() * (v.array() - ev)).matrix() / (2.0 * params.c);
  return ev - params.c * a.squaredNorm();
}

// Uniform draw in [0, 1) from the top 53 bits, independent of the standard
// library's distribution implementation.
double Canonical(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t SampleAlternative(const Vector& p, Rng& rng) {
  const double u = Canonical(rng);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    acc += p(k);
    if (u < acc) return static_cast<std::size_t>(k);
  }
  return static_cast<std::size_t>(p.size() - 1);
}

struct Context {
  MechanismParams params;
  double x = 0.0;
  double beta = 0.0;
  OutcomeModel model;
  WeightRule rule;
};

Context Prepare(const ValueProfile& values, const Vector& truth,
                const SquapConfig& config, SquapRun* run) {
  if (truth.size() != static_cast<Eigen::Index>(values.alternatives())) {
    ThrowInvalid("truth B length does not match the alternatives");
  }
  if ((truth.array() < 0.0).any() || !truth.allFinite()) {
    ThrowInvalid("external welfare B must be finite and nonnegative");
  }
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    ThrowInvalid("epsilon must be positive");
  }
  Context ctx;
  ctx.x = values.max_value();
  if (!(ctx.x > 0.0)) {
    throw Error(ErrorCode::kDegenerateInstance, "all agent values are zero");
  }
  ctx.params = config.c ? MechanismParams::Create(*config.c, values)
                        : MechanismParams::HalfMaxValue(values);
  ctx.beta = config.epsilon * ctx.x;
  ctx.model.means = truth;
  if (config.outcome_variance.size() != 0) {
    if (config.outcome_variance.size() != truth.size() ||
        (config.outcome_variance.array() < 0.0).any()) {
      ThrowInvalid("outcome variance must be nonnegative with one entry per alternative");
    }
    ctx.model.variances = config.outcome_variance;
  }
  ctx.rule.kind = config.weighting;

  run->config = config;
  run->x = ctx.x;
  run->beta = ctx.beta;
  run->c = ctx.params.c;
  run->alpha = std::sqrt(config.epsilon);
  run->truth = truth;
  run->manipulator = config.manipulator.value_or(WidestRange(values));
  if (run->manipulator >= values.agents()) ThrowInvalid("manipulator index out of range");
  return ctx;
}

struct StageOne {
  std::optional<MarketState> market;
  std::optional<WagerState> wager;
};

StageOne Aggregate(const ValueProfile& values, const Context& ctx,
                   SquapRun* run) {
  const SquapConfig& config = run->config;
  std::optional<Manipulator> manipulator;
  if (config.manipulate) {
    Manipulator m;
    const std::size_t who = run->manipulator;
    const MechanismParams params = ctx.params;
    m.decision_utility = [&values, who, params](const Vector& b) {
      return FocalUtility(values, who, b, params);
    };
    m.search_radius = 10.0 * ctx.x;
    m.starts = 5;
    m.seed = config.seed ^ kManipulatorStream;
    manipulator = std::move(m);
  }

  StageOne out;
  if (config.kind == AggregationKind::kMarket) {
    const Vector initial =
        config.initial ? *config.initial : Vector::Zero(run->truth.size());
    MarketOutcome mo =
        SimulateEfficientMarket(run->truth, initial, ctx.beta, manipulator);
    run->bhat = mo.bhat;
    run->aggregation_converged = mo.converged;
    for (std::size_t t = 0; t <= mo.state.trades(); ++t) {
      run->predictions.push_back(mo.state.prediction(t));
    }
    out.market = std::move(mo.state);
  } else {
    WagerOutcome wo =
        SimulateWagering(run->truth, config.forecasters, ctx.beta, manipulator);
    run->bhat = wo.bhat;
    run->aggregation_converged = wo.converged;
    for (Eigen::Index i = 0; i < wo.state.predictions().rows(); ++i) {
      run->predictions.push_back(wo.state.predictions().row(i).transpose());
    }
    out.wager = std::move(wo.state);
  }
  run->deviation = (run->bhat - run->truth).cwiseAbs().maxCoeff();
  return out;
}

void SettleAggregation(const StageOne& stage, const Context& ctx, SquapRun* run) {
  Rng rng = MakeRng(run->config.seed, kSettlementStream);
  run->chosen = SampleAlternative(run->p, rng);
  run->bstar = ctx.model.Sample(run->chosen, rng);

  IndependenceProbe probe;
  probe.extra.push_back(run->p);
  if (stage.market) {
    const MarketState& s = *stage.market;
    run->aggregation_payoffs.resize(static_cast<Eigen::Index>(s.trades()));
    for (std::size_t t = 1; t <= s.trades(); ++t) {
      run->aggregation_payoffs(static_cast<Eigen::Index>(t - 1)) =
          MarketPayoff(t, s, run->chosen, run->p, run->bstar, ctx.rule);
    }
    run->independence_spread =
        MarketAlternativeIndependence(s, ctx.model, ctx.rule, probe);
  } else {
    const WagerState& s = *stage.wager;
    run->aggregation_payoffs =
        WageringPayoffs(s, run->chosen, run->p, run->bstar, ctx.rule);
    run->independence_spread =
        WageringAlternativeIndependence(s, ctx.model, ctx.rule, probe);
  }
}

void Measure(const ValueProfile& values, const Context& ctx, const Vector& offset,
             SquapRun* run) {
  const Vector welfare = values.aggregates() + run->truth;
  run->welfare = run->p.dot(welfare);
  run->optimal_welfare = welfare.maxCoeff();
  run->spread = run->optimal_welfare / ctx.x;

  // Loss from abstaining instead of playing the focal votes.
  const Vector total = offset + run->votes.Aggregates();
  const Eigen::RowVectorXd zero = Eigen::RowVectorXd::Zero(total.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < values.agents(); ++i) {
    const auto own = run->votes.agent(i);
    const Vector others = total - own.transpose();
    const double focal = StrategicUtility(own, others, values.agent(i), ctx.params.c);
    const double idle = StrategicUtility(zero, others, values.agent(i), ctx.params.c);
    loss = std::max(loss, focal - idle);
  }
  run->max_zero_vote_loss = loss;
}

void Report(const ValueProfile& values, const Context& ctx, SquapRun* run) {
  const bool importance = ctx.rule.kind == Weighting::kImportance;
  const bool base = !run->practical && importance && run->aggregation_converged;
  const bool two_alt = values.alternatives() == 2;
  const bool half_max = AtHalfMaxCost(ctx.params.c, ctx.x);

  run->bounds.clear();
  run->bounds.push_back(MakeReport("accuracy", run->alpha * ctx.x, run->deviation,
                                   BoundSense::kUpper, base));
  run->bounds.push_back(MakeReport("independence", 1e-10, run->independence_spread,
                                   BoundSense::kUpper, base));
  run->bounds.push_back(MakeReport("zero_vote_loss", ctx.x, run->max_zero_vote_loss,
                                   BoundSense::kUpper, !run->practical));
  run->bounds.push_back(MakeReport(
      "squap", BoundSquap(run->spread, run->alpha),
      run->welfare / run->optimal_welfare, BoundSense::kLower,
      base && two_alt && half_max && !run->config.redistribute));
  run->certified = base && two_alt && half_max && !run->config.redistribute &&
                   AllCertifiedHold(run->bounds);
}

}  // namespace

std::string_view AggregationKindName(AggregationKind kind) {
  return kind == AggregationKind::kMarket ? "market" : "wagering";
}

AggregationKind ParseAggregationKind(std::string_view name) {
  if (name == "market") return AggregationKind::kMarket;
  if (name == "wagering") return AggregationKind::kWagering;
  ThrowInvalid("unknown aggregation kind '" + std::string(name) + "'");
}

SquapRun RunImpracticalSquap(const ValueProfile& values, const Vector& truth,
                             const SquapConfig& config) {
  SquapRun run;
  const Context ctx = Prepare(values, truth, config, &run);
  const StageOne stage =
      Staged("aggregation", [&] { return Aggregate(values, ctx, &run); });

  const SyntheticCommitment commitment = Staged(
      "commit", [&] { return Commit(values.aggregates(), run.bhat, ctx.params); });
  Staged("decision", [&] {
    run.votes = FocalVotes(values, commitment, ctx.params);
    const ImpracticalResult r =
        RunImpractical(commitment, run.votes, ctx.params, config.redistribute);
    run.aggregates = commitment.aggregates;
    run.a_mech = commitment.a_mech;
    run.p = r.outcome.p();
    run.payments = r.payments;
  });
  Staged("settlement", [&] { SettleAggregation(stage, ctx, &run); });
  Measure(values, ctx, run.a_mech, &run);
  Report(values, ctx, &run);
  return run;
}

SquapRun RunPracticalSquap(const ValueProfile& values, const Vector& truth,
                           const SquapConfig& config) {
  if (values.alternatives() != 2) ThrowInvalid("practical SQUAP needs m = 2");
  SquapRun run;
  run.practical = true;
  const Context ctx = Prepare(values, truth, config, &run);
  const StageOne stage =
      Staged("aggregation", [&] { return Aggregate(values, ctx, &run); });

  Staged("decision", [&] {
    // Agents play the focal votes; the mechanism only sees their sums.
    const SyntheticCommitment focal = Commit(values.aggregates(), run.bhat, ctx.params);
    run.votes = FocalVotes(values, focal, ctx.params);
    const Vector sums = run.votes.Aggregates();
    const PracticalTwoAltResult r = SolvePracticalTwoAlt(sums, run.bhat, ctx.params);
    run.p = Vector(2);
    run.p << r.p1, 1.0 - r.p1;
    run.a_mech = r.a_mech;
    run.aggregates = sums + r.a_mech;
    run.payments = Settle(run.votes, ctx.params, config.redistribute);
    if (config.manipulation_grid > 0) {
      run.manipulation = PracticalManipulationExperiment(
          values, run.bhat, truth, ctx.params, run.manipulator, config.manipulation_grid);
    }
  });
  Staged("settlement", [&] { SettleAggregation(stage, ctx, &run); });
  Measure(values, ctx, run.a_mech, &run);
  Report(values, ctx, &run);
  return run;
}

bool AccuracyBoundCheck(const SquapRun& run, double alpha, double x) {
  const double bound = alpha * x;
  return (run.bhat - run.truth).cwiseAbs().maxCoeff() <= bound * (1.0 + 1e-12);
}

SelfFunding SelfFundingCheck(const std::vector<SquapRun>& runs, double beta) {
  if (runs.empty()) ThrowInvalid("self-funding check needs at least one run");
  if (!(beta > 0.0)) ThrowInvalid("beta must be positive");
  SelfFunding out;
  for (const SquapRun& run : runs) {
    if (run.config.kind != AggregationKind::kMarket) {
      ThrowInvalid("self-funding check applies to market runs");
    }
    if (std::abs(run.beta - beta) > 1e-12 * beta) {
      ThrowInvalid("run used a different beta");
    }
    const Vector initial = run.config.initial ? *run.config.initial
                                              : Vector::Zero(run.truth.size());
    const double prior = (initial - run.truth).squaredNorm() / beta;
    const double final_gap = (run.bhat - run.truth).squaredNorm() / beta;
    out.expected_revenue += run.payments.revenue;
    out.expected_market_spend += prior - final_gap;
    out.spend_bound += prior;
  }
  const double n = static_cast<double>(runs.size());
  out.expected_revenue /= n;
  out.expected_market_spend /= n;
  out.spend_bound /= n;
  out.feasible = out.expected_revenue >= out.expected_market_spend;
  return out;
}

}  // namespace qtmlab
