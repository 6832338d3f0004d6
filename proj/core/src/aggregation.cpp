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

#include "qtmlab/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qtmlab/error.hpp"

namespace qtmlab {
namespace {

void CheckBeta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    ThrowInvalid("liquidity beta must be positive and finite");
  }
}

void CheckOutcome(const Vector& p, std::size_t k) {
  if (k >= static_cast<std::size_t>(p.size())) {
    ThrowInvalid("chosen alternative out of range");
  }
  if (!(p(static_cast<Eigen::Index>(k)) > 0.0)) {
    ThrowInvalid("chosen alternative must have positive probability");
  }
}

std::vector<Vector> Probes(std::size_t m, const IndependenceProbe& probe) {
  if (!(probe.steer > 0.0 && probe.steer <= 1.0)) {
    ThrowInvalid("steer must lie in (0, 1]");
  }
  std::vector<Vector> out;
  const auto mm = static_cast<Eigen::Index>(m);
  for (Eigen::Index k = 0; k < mm; ++k) {
    Vector p = Vector::Constant(mm, probe.steer / static_cast<double>(m));
    p(k) += 1.0 - probe.steer;
    out.push_back(std::move(p));
  }
  for (const Vector& p : probe.extra) {
    if (p.size() != mm) ThrowInvalid("probe distribution has the wrong length");
    out.push_back(p);
  }
  return out;
}

constexpr double kGolden = 0.6180339887498948482;

// Golden-section maximisation of a 1-D function on [lo, hi].
std::pair<double, double> GoldenMax(const std::function<double(double)>& f,
                                    double lo, double hi, int* evaluations) {
  double a = lo;
  double b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  *evaluations += 2;
  for (int it = 0; it < 100 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    }
    ++*evaluations;
  }
  return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

double QuadraticScore(double bhat, double bstar, double beta) {
  CheckBeta(beta);
  const double d = bhat - bstar;
  return -d * d / beta;
}

double ExpectedScore(const Vector& bhat, const Vector& means, double beta) {
  CheckBeta(beta);
  if (bhat.size() != means.size()) ThrowInvalid("prediction and means differ in length");
  return -(bhat - means).squaredNorm() / beta;
}

std::string_view WeightingName(Weighting weighting) {
  switch (weighting) {
    case Weighting::kImportance:
      return "importance";
    case Weighting::kUnweighted:
      return "unweighted";
    case Weighting::kClipped:
      return "clipped";
  }
  return "importance";
}

Weighting ParseWeighting(std::string_view name) {
  if (name == "importance") return Weighting::kImportance;
  if (name == "unweighted") return Weighting::kUnweighted;
  if (name == "clipped") return Weighting::kClipped;
  ThrowInvalid("unknown weighting '" + std::string(name) + "'");
}

double WeightRule::operator()(double p_k) const {
  switch (kind) {
    case Weighting::kImportance:
      return 1.0 / p_k;
    case Weighting::kUnweighted:
      return 1.0;
    case Weighting::kClipped:
      return std::min(1.0 / p_k, clip);
  }
  return 1.0 / p_k;
}

OutcomeModel OutcomeModel::PointMass(Vector means) {
  return OutcomeModel{std::move(means), Vector()};
}

double OutcomeModel::Variance(std::size_t k) const {
  if (variances.size() == 0) return 0.0;
  return variances(static_cast<Eigen::Index>(k));
}

double OutcomeModel::ExpectedScore(double bhat, std::size_t k, double beta) const {
  const double d = bhat - means(static_cast<Eigen::Index>(k));
  return -(d * d + Variance(k)) / beta;
}

double OutcomeModel::Sample(std::size_t k, Rng& rng) const {
  const double mean = means(static_cast<Eigen::Index>(k));
  const double var = Variance(k);
  if (var <= 0.0) return mean;
  std::normal_distribution<double> dist(mean, std::sqrt(var));
  return dist(rng);
}

MarketState::MarketState(double beta, Vector initial)
    : beta_(beta), initial_(std::move(initial)) {
  CheckBeta(beta_);
  if (initial_.size() < 1 || !initial_.allFinite()) {
    ThrowInvalid("market needs a finite initial estimate");
  }
}

const Vector& MarketState::prediction(std::size_t t) const {
  if (t == 0) return initial_;
  if (t > history_.size()) ThrowInvalid("trade index out of range");
  return history_[t - 1];
}

void MarketState::Trade(Vector prediction) {
  if (prediction.size() != initial_.size() || !prediction.allFinite()) {
    ThrowInvalid("trade has the wrong length or non-finite entries");
  }
  history_.push_back(std::move(prediction));
}

double MarketPayoff(std::size_t t, const MarketState& state, std::size_t k,
                    const Vector& p, double bstar, const WeightRule& rule) {
  if (t == 0 || t > state.trades()) ThrowInvalid("trader index must be in 1..N");
  CheckOutcome(p, k);
  const auto kk = static_cast<Eigen::Index>(k);
  const double now = QuadraticScore(state.prediction(t)(kk), bstar, state.beta());
  const double before =
      QuadraticScore(state.prediction(t - 1)(kk), bstar, state.beta());
  return rule(p(kk)) * (now - before);
}

double ExpectedMarketPayoff(std::size_t t, const MarketState& state,
                            const Vector& p, const OutcomeModel& model,
                            const WeightRule& rule) {
  if (t == 0 || t > state.trades()) ThrowInvalid("trader index must be in 1..N");
  double total = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p(k) <= 0.0) continue;
    const auto kk = static_cast<std::size_t>(k);
    const double now = model.ExpectedScore(state.prediction(t)(k), kk, state.beta());
    const double before =
        model.ExpectedScore(state.prediction(t - 1)(k), kk, state.beta());
    total += p(k) * rule(p(k)) * (now - before);
  }
  return total;
}

double MarketTotalPayment(const MarketState& state, std::size_t k,
                          const Vector& p, double bstar, const WeightRule& rule) {
  double total = 0.0;
  for (std::size_t t = 1; t <= state.trades(); ++t) {
    total += MarketPayoff(t, state, k, p, bstar, rule);
  }
  return total;
}

double MarketDeviationBound(double epsilon, double x) {
  if (!(epsilon > 0.0) || !(x > 0.0)) ThrowInvalid("epsilon and x must be positive");
  return std::sqrt(epsilon) * x;
}

ReportSearch MaximizeReport(const std::function<double(const Vector&)>& objective,
                            const Vector& center, double radius, int starts,
                            std::uint64_t seed) {
  if (!(radius > 0.0)) ThrowInvalid("search radius must be positive");
  ReportSearch best;
  best.report = center;
  best.objective = objective(center);
  best.evaluations = 1;

  Rng rng = MakeRng(seed, 0x60D);
  std::uniform_real_distribution<double> offset(-radius, radius);
  const auto m = center.size();
  for (int s = 0; s < std::max(1, starts); ++s) {
    Vector x = center;
    if (s > 0) {
      for (Eigen::Index k = 0; k < m; ++k) x(k) += offset(rng);
    }
    double fx = objective(x);
    ++best.evaluations;
    bool settled = false;
    for (int sweep = 0; sweep < 60 && !settled; ++sweep) {
      const double before = fx;
      for (Eigen::Index k = 0; k < m; ++k) {
        auto line = [&](double t) {
          Vector y = x;
          y(k) = t;
          return objective(y);
        };
        const auto [t, ft] =
            GoldenMax(line, center(k) - radius, center(k) + radius, &best.evaluations);
        if (ft > fx) {
          x(k) = t;
          fx = ft;
        }
      }
      settled = fx - before <= 1e-14 * (1.0 + std::abs(fx));
    }
    if (!settled) best.converged = false;
    if (fx > best.objective) {
      best.objective = fx;
      best.report = x;
    }
  }
  return best;
}

MarketOutcome SimulateEfficientMarket(const Vector& truth, const Vector& initial,
                                      double beta,
                                      const std::optional<Manipulator>& manipulator,
                                      const std::vector<Vector>& prefix) {
  if (truth.size() != initial.size()) ThrowInvalid("truth and initial differ in length");
  MarketState state(beta, initial);
  for (const Vector& trade : prefix) state.Trade(trade);
  state.Trade(truth);

  MarketOutcome out{state, truth, false, true};
  if (!manipulator) return out;

  // By telescoping, the final trade's expected payoff relative to leaving the
  // market at the truth is ExpectedScore(report, truth).
  auto objective = [&](const Vector& report) {
    return ExpectedScore(report, truth, beta) + manipulator->decision_utility(report);
  };
  const ReportSearch search = MaximizeReport(objective, truth, manipulator->search_radius,
                                             manipulator->starts, manipulator->seed);
  out.state.Trade(search.report);
  out.bhat = search.report;
  out.manipulated = true;
  out.converged = search.converged;
  return out;
}

WagerState::WagerState(double beta, Matrix predictions)
    : beta_(beta), predictions_(std::move(predictions)) {
  CheckBeta(beta_);
  if (predictions_.rows() < 1 || predictions_.cols() < 1 || !predictions_.allFinite()) {
    ThrowInvalid("wagering needs at least one finite prediction");
  }
}

Vector WageringPayoffs(const WagerState& state, std::size_t k, const Vector& p,
                       double bstar, const WeightRule& rule) {
  CheckOutcome(p, k);
  const auto kk = static_cast<Eigen::Index>(k);
  const auto n = state.predictions().rows();
  Vector scores(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    scores(i) = QuadraticScore(state.predictions()(i, kk), bstar, state.beta());
  }
  Vector centred = (scores.array() - scores.mean()).matrix();
  // One correction pass removes the rounding left in the mean.
  centred.array() -= centred.sum() / static_cast<double>(n);
  return rule(p(kk)) * centred;
}

Vector ExpectedWageringPayoffs(const WagerState& state, const Vector& p,
                               const OutcomeModel& model, const WeightRule& rule) {
  const auto n = state.predictions().rows();
  Vector total = Vector::Zero(n);
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p(k) <= 0.0) continue;
    Vector scores(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      scores(i) = model.ExpectedScore(state.predictions()(i, k),
                                      static_cast<std::size_t>(k), state.beta());
    }
    total += p(k) * rule(p(k)) * (scores.array() - scores.mean()).matrix();
  }
  return total;
}

Vector WageringAggregate(const WagerState& state) {
  return state.predictions().colwise().mean().transpose();
}

WagerOutcome SimulateWagering(const Vector& truth, std::size_t forecasters,
                              double beta,
                              const std::optional<Manipulator>& manipulator) {
  if (forecasters < 1) ThrowInvalid("wagering needs at least one forecaster");
  if (manipulator && forecasters < 2) {
    ThrowInvalid("a wagering manipulator needs N >= 2 forecasters");
  }
  const auto n = static_cast<Eigen::Index>(forecasters);
  Matrix predictions(n, truth.size());
  predictions.rowwise() = truth.transpose();
  if (!manipulator) {
    WagerState state(beta, predictions);
    return WagerOutcome{state, WageringAggregate(state), 0, false, true};
  }

  const double nf = static_cast<double>(forecasters);
  // Forecaster 0's own-report terms: (1 - 1/N) * ExpectedScore(report, truth).
  auto aggregate_for = [&](const Vector& report) {
    return Vector(truth + (report - truth) / nf);
  };
  auto objective = [&](const Vector& report) {
    return (1.0 - 1.0 / nf) * ExpectedScore(report, truth, beta) +
           manipulator->decision_utility(aggregate_for(report));
  };
  const ReportSearch search = MaximizeReport(objective, truth, manipulator->search_radius,
                                             manipulator->starts, manipulator->seed);
  predictions.row(0) = search.report.transpose();
  WagerState state(beta, predictions);
  return WagerOutcome{state, WageringAggregate(state), 0, true, search.converged};
}

double MarketAlternativeIndependence(const MarketState& state,
                                     const OutcomeModel& model,
                                     const WeightRule& rule,
                                     const IndependenceProbe& probe) {
  const std::vector<Vector> probes = Probes(state.alternatives(), probe);
  double spread = 0.0;
  for (std::size_t t = 1; t <= state.trades(); ++t) {
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const double v = ExpectedMarketPayoff(t, state, probes[j], model, rule);
      lo = j == 0 ? v : std::min(lo, v);
      hi = j == 0 ? v : std::max(hi, v);
    }
    spread = std::max(spread, hi - lo);
  }
  return spread;
}

double WageringAlternativeIndependence(const WagerState& state,
                                       const OutcomeModel& model,
                                       const WeightRule& rule,
                                       const IndependenceProbe& probe) {
  const std::vector<Vector> probes = Probes(state.alternatives(), probe);
  Vector lo;
  Vector hi;
  for (std::size_t j = 0; j < probes.size(); ++j) {
    const Vector v = ExpectedWageringPayoffs(state, probes[j], model, rule);
    if (j == 0) {
      lo = v;
      hi = v;
    } else {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  }
  return (hi - lo).maxCoeff();
}

}  // namespace qtmlab
