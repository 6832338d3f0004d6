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

#ifndef QTMLAB_AGGREGATION_HPP_
#define QTMLAB_AGGREGATION_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "qtmlab/generator.hpp"
#include "qtmlab/types.hpp"

namespace qtmlab {

// s(bhat, b*) = -(bhat - b*)^2 / beta.
double QuadraticScore(double bhat, double bstar, double beta);

// -(1/beta) sum_k (bhat_k - B_k)^2: the expected importance-weighted score
// of a prediction, up to the variance term that cancels in every payoff.
double ExpectedScore(const Vector& bhat, const Vector& means, double beta);

// How realized scores are scaled once alternative k has been chosen.
enum class Weighting {
  kImportance,  // 1 / p_k
  kUnweighted,  // 1, not alternative-independent
  kClipped,     // min(1 / p_k, clip), excluded from certified checks
};

std::string_view WeightingName(Weighting weighting);
Weighting ParseWeighting(std::string_view name);

struct WeightRule {
  Weighting kind = Weighting::kImportance;
  double clip = 100.0;
  double operator()(double p_k) const;
};

// Outcome b*_k ~ D_k^*: point mass at the mean by default, Gaussian when a
// variance is supplied.
struct OutcomeModel {
  Vector means;
  Vector variances;  // empty means all zero

  static OutcomeModel PointMass(Vector means);
  double Variance(std::size_t k) const;
  // E[s(bhat, b*_k)] = -((bhat - B_k)^2 + Var_k) / beta.
  double ExpectedScore(double bhat, std::size_t k, double beta) const;
  double Sample(std::size_t k, Rng& rng) const;
};

// Scoring-rule decision market: one quadratic-score market per alternative.
class MarketState {
 public:
  MarketState(double beta, Vector initial);

  double beta() const { return beta_; }
  const Vector& initial() const { return initial_; }
  std::size_t trades() const { return history_.size(); }
  std::size_t alternatives() const { return static_cast<std::size_t>(initial_.size()); }
  // Prediction after trade t (t = 0 is the initial estimate).
  const Vector& prediction(std::size_t t) const;
  const Vector& latest() const { return prediction(trades()); }

  void Trade(Vector prediction);

 private:
  double beta_;
  Vector initial_;
  std::vector<Vector> history_;
};

// Net payoff of trader t (1-based) once alternative k is chosen and b* seen:
//   w(p_k) [s(bhat^t_k, b*) - s(bhat^{t-1}_k, b*)].
double MarketPayoff(std::size_t t, const MarketState& state, std::size_t k,
                    const Vector& p, double bstar, const WeightRule& rule = {});

// Expected payoff of trader t over k ~ p and b* ~ D, computed analytically.
double ExpectedMarketPayoff(std::size_t t, const MarketState& state,
                            const Vector& p, const OutcomeModel& model,
                            const WeightRule& rule = {});

// Sum of trader payoffs; telescopes to w(p_k)[s(final) - s(initial)].
double MarketTotalPayment(const MarketState& state, std::size_t k,
                          const Vector& p, double bstar,
                          const WeightRule& rule = {});

// sqrt(epsilon) * x: the certified market deviation bound for beta = eps x.
double MarketDeviationBound(double epsilon, double x);

// Maximises an objective over reports near `center` by cyclic coordinate
// golden-section search inside [center - radius, center + radius], started
// from the center and `starts - 1` seeded random points. The result is never
// worse than the center.
struct ReportSearch {
  Vector report;
  double objective = 0.0;
  bool converged = true;
  int evaluations = 0;
};

ReportSearch MaximizeReport(const std::function<double(const Vector&)>& objective,
                            const Vector& center, double radius, int starts,
                            std::uint64_t seed);

// A participant who also holds a stake in the decision stage: `decision_utility`
// maps the elicited estimates Bhat to their expected decision-stage utility.
struct Manipulator {
  std::function<double(const Vector&)> decision_utility;
  double search_radius = 10.0;
  int starts = 5;
  std::uint64_t seed = 0;
};

struct MarketOutcome {
  MarketState state;
  Vector bhat;  // final estimates
  bool manipulated = false;
  bool converged = true;
};

// Efficient market: the prefix trades are replayed, then the market reaches
// the truth B; an optional manipulator trades once more.
MarketOutcome SimulateEfficientMarket(const Vector& truth, const Vector& initial,
                                      double beta,
                                      const std::optional<Manipulator>& manipulator = {},
                                      const std::vector<Vector>& prefix = {});

// Importance-weighted quadratic decision wagering with unit wagers.
class WagerState {
 public:
  WagerState(double beta, Matrix predictions);

  double beta() const { return beta_; }
  std::size_t forecasters() const { return static_cast<std::size_t>(predictions_.rows()); }
  std::size_t alternatives() const { return static_cast<std::size_t>(predictions_.cols()); }
  const Matrix& predictions() const { return predictions_; }

 private:
  double beta_;
  Matrix predictions_;
};

// pi_i = w(p_k) [s(bhat^i_k, b*) - (1/N) sum_j s(bhat^j_k, b*)].
Vector WageringPayoffs(const WagerState& state, std::size_t k, const Vector& p,
                       double bstar, const WeightRule& rule = {});

// Expected payoffs over k ~ p and b* ~ D.
Vector ExpectedWageringPayoffs(const WagerState& state, const Vector& p,
                               const OutcomeModel& model,
                               const WeightRule& rule = {});

// Bhat_k = (1/N) sum_i bhat^i_k.
Vector WageringAggregate(const WagerState& state);

struct WagerOutcome {
  WagerState state;
  Vector bhat;
  std::size_t manipulator_index = 0;
  bool manipulated = false;
  bool converged = true;
};

// N forecasters with the common (immutable) belief `truth`; forecaster 0 is
// the manipulator when one is supplied.
WagerOutcome SimulateWagering(const Vector& truth, std::size_t forecasters,
                              double beta,
                              const std::optional<Manipulator>& manipulator = {});

// Largest spread, over participants, of expected net payment across decision
// rules that steer toward each alternative in turn. Probe k uses
//   p^(k) = (1 - steer) e_k + steer / m,
// plus any extra probes supplied. Importance weighting gives zero spread.
struct IndependenceProbe {
  double steer = 0.1;
  std::vector<Vector> extra;
};

double MarketAlternativeIndependence(const MarketState& state,
                                     const OutcomeModel& model,
                                     const WeightRule& rule,
                                     const IndependenceProbe& probe = {});
double WageringAlternativeIndependence(const WagerState& state,
                                       const OutcomeModel& model,
                                       const WeightRule& rule,
                                       const IndependenceProbe& probe = {});

}  // namespace qtmlab

#endif  // QTMLAB_AGGREGATION_HPP_
