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

#ifndef QTMLAB_ANALYSIS_HPP_
#define QTMLAB_ANALYSIS_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtmlab/equilibrium.hpp"
#include "qtmlab/types.hpp"

namespace qtmlab {

// sum_k p_k W_k / max_k W_k. Any ordering of W is accepted; throws when the
// best welfare is not positive.
double Ppoa(const SoftmaxOutcome& outcome, const Vector& welfare);
double Ppoa(const Vector& p, const Vector& welfare);

// Closed-form guarantees.
double BoundSpread(double spread);              // max{1/2, 1 - (2/T)^(2/5)}
double BoundGap(double gap);                    // max{1/2, 1 - (4/G)^(2/3)}
double BoundP1(double c, double delta);         // 1 - (8c / dV)^(2/3)
double BoundM(std::size_t m);                   // 1/m
double BoundSquap(double spread, double alpha); // 1 - 2 alpha / T - (4/T)^(2/5)

// Two-sided bound on an equilibrium quantity. `upper_valid` is false when the
// upper bound's logarithm is not positive (dV <= 2c).
struct Sandwich {
  double lower = 0.0;
  double upper = 0.0;
  bool upper_valid = false;
};

// Revenue at the two-alternative equilibrium, with D' = sum_i (v_1^i - v_2^i)^2:
//   (2c/9) D'/dV^2 max{0, ln(dV/8c)}^2 <= revenue <= (c/2) D'/dV^2 ln(dV/2c)^2.
// Uses the canonical order. Requires m = 2 and V_1 > V_2.
Sandwich RevenueSandwich(const ValueProfile& values, const MechanismParams& params);

// max{0, ln(dV/8c)/3} <= A_1 <= ln(dV/2c)/2.
Sandwich A1Sandwich(double delta, double c);

enum class BoundSense {
  kLower,  // measured should be >= value
  kUpper,  // measured should be <= value
};

struct BoundReport {
  std::string name;
  double value = 0.0;
  double measured = 0.0;
  // Signed slack in the bound's favour: measured - value for lower bounds,
  // value - measured for upper bounds.
  double margin = 0.0;
  BoundSense sense = BoundSense::kLower;
  // False when the instance sits outside the regime the guarantee covers; the
  // report is then a measurement only.
  bool certified = true;

  bool Holds(double tol = 1e-9) const { return margin >= -tol; }
};

BoundReport MakeReport(std::string name, double value, double measured,
                       BoundSense sense, bool certified);

std::string_view BoundSenseName(BoundSense sense);

struct CertifyOptions {
  std::optional<ExternalWelfare> external;
  // Deviation bound of the elicited estimates in units of the max value;
  // enables the two-stage bound when `external` is present.
  std::optional<double> alpha;
};

// Evaluates every applicable guarantee on one solved instance. The spread and
// gap guarantees are certified only at c = max value / 2, the revenue and A_1
// sandwiches only for dV > 8c, and the 1/m floor for m > 2.
std::vector<BoundReport> CertifyInstance(const EquilibriumSolution& eq,
                                         const ValueProfile& values,
                                         const MechanismParams& params,
                                         const CertifyOptions& options = {});

// True when every certified report holds within `tol`.
bool AllCertifiedHold(const std::vector<BoundReport>& reports, double tol = 1e-9);

// c is within relative 1e-12 of max value / 2.
bool AtHalfMaxCost(double c, double max_value);

}  // namespace qtmlab

#endif  // QTMLAB_ANALYSIS_HPP_
