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

#include "qtmlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qtmlab/error.hpp"
#include "qtmlab/qtm.hpp"
#include "qtmlab/stats.hpp"

namespace qtmlab {
namespace {

void RequirePositive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    ThrowInvalid(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

double Ppoa(const Vector& p, const Vector& welfare) {
  if (p.size() != welfare.size() || p.size() == 0) {
    ThrowInvalid("outcome and welfare differ in length");
  }
  const double best = welfare.maxCoeff();
  if (!(best > 0.0)) {
    throw Error(ErrorCode::kDegenerateInstance, "best welfare must be positive");
  }
  return p.dot(welfare) / best;
}

double Ppoa(const SoftmaxOutcome& outcome, const Vector& welfare) {
  return Ppoa(outcome.p(), welfare);
}

double BoundSpread(double spread) {
  RequirePositive(spread, "spread");
  return std::max(0.5, 1.0 - std::pow(2.0 / spread, 0.4));
}

double BoundGap(double gap) {
  RequirePositive(gap, "gap");
  return std::max(0.5, 1.0 - std::pow(4.0 / gap, 2.0 / 3.0));
}

double BoundP1(double c, double delta) {
  RequirePositive(c, "c");
  RequirePositive(delta, "welfare gap");
  return 1.0 - std::pow(8.0 * c / delta, 2.0 / 3.0);
}

double BoundM(std::size_t m) {
  if (m == 0) ThrowInvalid("m must be positive");
  return 1.0 / static_cast<double>(m);
}

double BoundSquap(double spread, double alpha) {
  RequirePositive(spread, "spread");
  if (!(alpha >= 0.0)) ThrowInvalid("alpha must be nonnegative");
  return 1.0 - 2.0 * alpha / spread - std::pow(4.0 / spread, 0.4);
}

Sandwich RevenueSandwich(const ValueProfile& values, const MechanismParams& params) {
  if (values.alternatives() != 2) ThrowInvalid("revenue sandwich needs m = 2");
  const auto& order = values.canonical_order();
  const Vector& agg = values.aggregates();
  const auto top = static_cast<Eigen::Index>(order[0]);
  const auto second = static_cast<Eigen::Index>(order[1]);
  const double delta = agg(top) - agg(second);
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::kDegenerateInstance, "revenue sandwich needs V_1 > V_2");
  }
  const double spread_sq =
      (values.values().col(top) - values.values().col(second)).squaredNorm();
  const double scale = spread_sq / (delta * delta);
  const double c = params.c;
  const double lo_log = std::max(0.0, std::log(delta / (8.0 * c)));
  const double hi_log = std::log(delta / (2.0 * c));
  return Sandwich{2.0 * c / 9.0 * scale * lo_log * lo_log,
                  0.5 * c * scale * hi_log * hi_log, delta > 2.0 * c};
}

Sandwich A1Sandwich(double delta, double c) {
  RequirePositive(delta, "welfare gap");
  RequirePositive(c, "c");
  return Sandwich{std::max(0.0, std::log(delta / (8.0 * c)) / 3.0),
                  0.5 * std::log(delta / (2.0 * c)), delta > 2.0 * c};
}

std::string_view BoundSenseName(BoundSense sense) {
  return sense == BoundSense::kLower ? "lower" : "upper";
}

BoundReport MakeReport(std::string name, double value, double measured,
                       BoundSense sense, bool certified) {
  BoundReport r;
  r.name = std::move(name);
  r.value = value;
  r.measured = measured;
  r.sense = sense;
  r.margin = sense == BoundSense::kLower ? measured - value : value - measured;
  r.certified = certified;
  return r;
}

bool AtHalfMaxCost(double c, double max_value) {
  const double half = 0.5 * max_value;
  return std::abs(c - half) <= 1e-12 * half;
}

std::vector<BoundReport> CertifyInstance(const EquilibriumSolution& eq,
                                         const ValueProfile& values,
                                         const MechanismParams& params,
                                         const CertifyOptions& options) {
  const std::size_t m = values.alternatives();
  if (static_cast<std::size_t>(eq.p.size()) != m) {
    ThrowInvalid("solution does not match the instance");
  }
  const InstanceStats stats = ComputeStats(values, options.external);
  const Vector welfare = options.external
                             ? options.external->TrueWelfare(values.aggregates())
                             : values.aggregates();
  const bool solved = eq.status == SolveStatus::kConverged;
  const bool half_max = AtHalfMaxCost(params.c, stats.max_value);
  const double ppoa = Ppoa(eq.p, welfare);
  const auto top = static_cast<Eigen::Index>(stats.order[0]);

  std::vector<BoundReport> out;
  if (m == 2) {
    const double p1 = eq.p(top);
    const double delta = stats.welfare(0) - stats.welfare(1);
    out.push_back(MakeReport("p1_half", 0.5, p1, BoundSense::kLower, solved));
    if (delta > 0.0) {
      out.push_back(MakeReport("p1_gap", BoundP1(params.c, delta), p1,
                               BoundSense::kLower, solved));
      out.push_back(MakeReport("ppoa_gap", BoundGap(stats.gap), ppoa,
                               BoundSense::kLower, solved && half_max));
    }
    out.push_back(MakeReport("ppoa_spread", BoundSpread(stats.spread), ppoa,
                             BoundSense::kLower, solved && half_max));
    if (!options.external && delta > 0.0) {
      const bool wide = delta > 8.0 * params.c;
      const Sandwich rev = RevenueSandwich(values, params);
      const double revenue = Settle(eq.votes, params, false).revenue;
      out.push_back(MakeReport("revenue_lower", rev.lower, revenue,
                               BoundSense::kLower, solved && wide));
      out.push_back(MakeReport("revenue_upper", rev.upper, revenue,
                               BoundSense::kUpper, solved && wide));
      const Sandwich a1 = A1Sandwich(delta, params.c);
      const double a_top = eq.aggregates(top);
      out.push_back(MakeReport("a1_lower", a1.lower, a_top, BoundSense::kLower,
                               solved && wide));
      out.push_back(MakeReport("a1_upper", a1.upper, a_top, BoundSense::kUpper,
                               solved && wide));
    }
  } else {
    out.push_back(MakeReport("ppoa_floor_m", BoundM(m), ppoa, BoundSense::kLower,
                             solved && IsConcaveRegime(params.c, values)));
  }
  if (options.external && options.alpha) {
    out.push_back(MakeReport("squap", BoundSquap(stats.spread, *options.alpha), ppoa,
                             BoundSense::kLower, solved && half_max && m == 2));
  }
  return out;
}

bool AllCertifiedHold(const std::vector<BoundReport>& reports, double tol) {
  return std::all_of(reports.begin(), reports.end(), [tol](const BoundReport& r) {
    return !r.certified || r.Holds(tol);
  });
}

}  // namespace qtmlab
