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

#include "qtmlab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qtmlab/error.hpp"

namespace qtmlab {
namespace {

using Json = nlohmann::ordered_json;

Json ToJson(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Json ToJson(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

Json ToJson(const PaymentReport& r) {
  return Json{{"charge", ToJson(r.charge)},
              {"rebate", ToJson(r.rebate)},
              {"net", ToJson(r.net)},
              {"revenue", r.revenue}};
}

Json ToJson(const BoundReport& r) {
  return Json{{"name", r.name},          {"value", r.value},
              {"measured", r.measured},  {"margin", r.margin},
              {"sense", BoundSenseName(r.sense)}, {"certified", r.certified}};
}

Vector ReadVector(const Json& j, const char* what) {
  if (!j.is_array()) ThrowInvalid(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) ThrowInvalid(std::string(what) + " must hold numbers");
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  return v;
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string FormatReal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Instance ParseInstance(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParse,
                "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(),
                "parse");
  }
  if (!j.is_object()) ThrowInvalid("instance must be a JSON object");
  if (!j.contains("values")) ThrowInvalid("instance lacks \"values\"");
  const Json& rows = j["values"];
  if (!rows.is_array() || rows.empty()) ThrowInvalid("\"values\" must be a nonempty array");
  const std::size_t n = rows.size();
  const std::size_t m = rows[0].is_array() ? rows[0].size() : 0;
  Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    const Vector row = ReadVector(rows[i], "each values row");
    if (static_cast<std::size_t>(row.size()) != m) ThrowInvalid("ragged \"values\" rows");
    values.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  if (j.contains("n") && j["n"] != n) ThrowInvalid("\"n\" disagrees with \"values\"");
  if (j.contains("m") && j["m"] != m) ThrowInvalid("\"m\" disagrees with \"values\"");

  Instance out{ValueProfile(values), std::nullopt, std::nullopt};
  if (j.contains("B")) {
    Vector b = ReadVector(j["B"], "\"B\"");
    if (static_cast<std::size_t>(b.size()) != m) ThrowInvalid("\"B\" must have m entries");
    if ((b.array() < 0.0).any()) ThrowInvalid("\"B\" must be nonnegative");
    out.external = std::move(b);
  }
  if (j.contains("c")) {
    if (!j["c"].is_number()) ThrowInvalid("\"c\" must be a number");
    out.c = j["c"].get<double>();
  }
  return out;
}

Instance LoadInstance(const std::string& path) { return ParseInstance(ReadFile(path)); }

std::string InstanceJson(const Instance& instance) {
  Json j{{"schemaVersion", kSchemaVersion},
         {"n", instance.values.agents()},
         {"m", instance.values.alternatives()},
         {"values", ToJson(instance.values.values())}};
  if (instance.external) j["B"] = ToJson(*instance.external);
  if (instance.c) j["c"] = *instance.c;
  return Dump(j);
}

std::string CertificateJson(const EquilibriumSolution& eq,
                            const MechanismParams& params,
                            const InstanceStats& stats, std::uint64_t seed,
                            bool certified) {
  Json order = Json::array();
  for (std::size_t k : stats.order) order.push_back(k);
  Json j{{"schemaVersion", kSchemaVersion},
         {"kind", "certificate"},
         {"A", ToJson(eq.aggregates)},
         {"p", ToJson(eq.p)},
         {"votes", ToJson(eq.votes.votes())},
         {"focResidual", eq.foc_residual},
         {"brSlack", eq.br_slack},
         {"status", SolveStatusName(eq.status)},
         {"certified", certified},
         {"iterations", eq.iterations},
         {"seed", seed},
         {"params", {{"c", params.c}, {"concaveRegime", params.concave_regime}}},
         {"stats",
          {{"spread", stats.spread},
           {"gap", stats.gap},
           {"disagreement", stats.disagreement ? Json(*stats.disagreement) : Json()},
           {"maxValue", stats.max_value},
           {"order", order}}}};
  return Dump(j);
}

std::string CommitmentJson(const SyntheticCommitment& commitment,
                           const MechanismParams& params) {
  Json j{{"schemaVersion", kSchemaVersion},
         {"kind", "commitment"},
         {"A", ToJson(commitment.aggregates)},
         {"aMech", ToJson(commitment.a_mech)},
         {"p", ToJson(commitment.p)},
         {"W", ToJson(commitment.welfare)},
         {"residual", commitment.residual},
         {"params", {{"c", params.c}, {"solvedWithC", commitment.c}}}};
  return Dump(j);
}

std::string SquapRunJson(const SquapRun& run, bool compact) {
  const SquapConfig& cfg = run.config;
  Json config{{"aggregation", AggregationKindName(cfg.kind)},
              {"epsilon", cfg.epsilon},
              {"beta", run.beta},
              {"c", run.c},
              {"redistribute", cfg.redistribute},
              {"seed", cfg.seed},
              {"manipulate", cfg.manipulate},
              {"manipulator", run.manipulator},
              {"weighting", WeightingName(cfg.weighting)}};
  if (cfg.kind == AggregationKind::kWagering) config["forecasters"] = cfg.forecasters;
  if (cfg.initial) config["initial"] = ToJson(*cfg.initial);
  if (cfg.outcome_variance.size() != 0) {
    config["outcomeVariance"] = ToJson(cfg.outcome_variance);
  }

  Json bounds = Json::array();
  for (const BoundReport& r : run.bounds) bounds.push_back(ToJson(r));
  Json predictions = Json::array();
  for (const Vector& v : run.predictions) predictions.push_back(ToJson(v));

  Json j{{"schemaVersion", kSchemaVersion},
         {"kind", "squapRun"},
         {"variant", run.practical ? "practical" : "impractical"},
         {"mode", run.certified ? "certified" : "uncertified"},
         {"config", config},
         {"maxValue", run.x},
         {"alpha", run.alpha},
         {"B", ToJson(run.truth)},
         {"Bhat", ToJson(run.bhat)},
         {"deviation", run.deviation},
         {"aggregationConverged", run.aggregation_converged},
         {"predictions", predictions},
         {"A", ToJson(run.aggregates)},
         {"aMech", ToJson(run.a_mech)},
         {"decision", ToJson(run.p)},
         {"votes", ToJson(run.votes.votes())},
         {"chosen", run.chosen},
         {"bstar", run.bstar},
         {"payments", ToJson(run.payments)},
         {"aggregationPayoffs", ToJson(run.aggregation_payoffs)},
         {"welfare", run.welfare},
         {"optimalWelfare", run.optimal_welfare},
         {"spread", run.spread},
         {"independenceSpread", run.independence_spread},
         {"maxZeroVoteLoss", run.max_zero_vote_loss},
         {"bounds", bounds},
         {"certified", run.certified}};
  if (run.manipulation) {
    const ManipulationReport& m = *run.manipulation;
    j["manipulation"] = Json{{"focalP1", m.focal_p1},
                             {"focalUtility", m.focal_utility},
                             {"bestGain", m.best_gain},
                             {"bestDeviation", ToJson(m.best_deviation)},
                             {"welfareRatioAtBest", m.welfare_ratio_at_best},
                             {"worstWelfareRatio", m.worst_welfare_ratio}};
  }
  return compact ? j.dump() + "\n" : Dump(j);
}

std::string TranscriptJsonl(const SquapRun& run) {
  std::string out;
  const bool market = run.config.kind == AggregationKind::kMarket;
  // Market predictions start with the initial estimate (t = 0, no payoff).
  const std::size_t first = market ? 1 : 0;
  for (std::size_t r = first; r < run.predictions.size(); ++r) {
    const std::size_t t = market ? r : r + 1;
    Json line{{"t", t},
              {"bhat", ToJson(run.predictions[r])},
              {"payoffs", run.aggregation_payoffs(static_cast<Eigen::Index>(t - 1))},
              {"k", run.chosen},
              {"bstar", run.bstar}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::string CsvHeader(std::string_view kind, const std::vector<std::string>& columns) {
  std::string out = "# qtmlab-csv schema=" + std::to_string(kSchemaVersion) +
                    " kind=" + std::string(kind) + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  return out;
}

std::string BoundCsv(
    const std::vector<std::pair<std::string, std::vector<BoundReport>>>& reports) {
  std::string out = CsvHeader(
      "bounds", {"instance", "bound", "value", "measured", "margin", "sense", "certified"});
  for (const auto& [id, rows] : reports) {
    for (const BoundReport& r : rows) {
      out += id + "," + r.name + "," + FormatReal(r.value) + "," +
             FormatReal(r.measured) + "," + FormatReal(r.margin) + "," +
             std::string(BoundSenseName(r.sense)) + "," +
             (r.certified ? "1" : "0") + "\n";
    }
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowInvalid("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowInvalid("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) ThrowInvalid("short write to '" + path + "'");
}

}  // namespace qtmlab
