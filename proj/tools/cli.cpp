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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtmlab/analysis.hpp"
#include "qtmlab/error.hpp"
#include "qtmlab/generator.hpp"
#include "qtmlab/serialize.hpp"
#include "qtmlab/squap.hpp"
#include "qtmlab/stats.hpp"
#include "qtmlab/synthetic.hpp"

namespace qtmlab::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// Tolerances a solve must meet to be reported as certified.
constexpr double kFocTol = 1e-10;
constexpr double kBrTol = 1e-6;
constexpr double kMarginTol = 1e-9;
constexpr int kMultiStarts = 8;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<int> jobs;
  std::string mode = "certified";

  bool certified_mode() const { return mode == "certified"; }
};

Json ParseConfig(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParse,
                "malformed JSON in '" + path + "' at byte " + std::to_string(e.byte) +
                    ": " + e.what(),
                "config");
  }
}

void CheckKeys(const Json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) ThrowInvalid(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      ThrowInvalid("unknown key \"" + key + "\" in " + what);
    }
  }
}

template <typename T>
T Get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    ThrowInvalid(std::string("\"") + key + "\" has the wrong type");
  }
}

Vector GetVector(const Json& j, const char* key) {
  const Json& a = j.at(key);
  if (!a.is_array()) ThrowInvalid(std::string("\"") + key + "\" must be an array");
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a[k].is_number()) ThrowInvalid(std::string("\"") + key + "\" must hold numbers");
    v(static_cast<Eigen::Index>(k)) = a[k].get<double>();
  }
  return v;
}

std::vector<double> GetReals(const Json& j, const char* key) {
  if (!j.contains(key)) return {};
  const Vector v = GetVector(j, key);
  return std::vector<double>(v.data(), v.data() + v.size());
}

int Jobs(const Common& common) {
  int jobs = 1;
  if (common.jobs) {
    jobs = *common.jobs;
  } else if (const char* env = std::getenv("QTMLAB_JOBS"); env && *env) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (*end != '\0') ThrowInvalid("QTMLAB_JOBS must be an integer");
    jobs = static_cast<int>(parsed);
  }
  if (jobs < 1) ThrowInvalid("--jobs must be at least 1");
  return jobs;
}

// Runs body(i) for i in [0, count) on up to `jobs` threads. Exceptions are
// captured and the first one rethrown after all workers finish.
void ParallelFor(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

fs::path OutDir(const Common& common) {
  fs::path dir(common.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) ThrowInvalid("cannot create output directory '" + common.out + "'");
  return dir;
}

std::uint64_t RowSeed(std::uint64_t base, std::uint64_t row) {
  Rng rng = MakeRng(base, row + 1);
  return rng();
}

// ---------------------------------------------------------------------------
// Instance generation

const std::set<std::string> kGeneratorKeys = {
    "n", "m", "family", "lower", "upper", "constant", "favourFirst", "spread", "c", "seed"};

Instance GenerateFrom(const Json& j, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.n = Get<std::size_t>(j, "n", 1);
  spec.m = Get<std::size_t>(j, "m", 2);
  spec.family = ParseValueFamily(Get<std::string>(j, "family", "uniform"));
  spec.lower = Get<double>(j, "lower", 0.0);
  spec.upper = Get<double>(j, "upper", 1.0);
  if (j.contains("constant")) spec.constant = GetVector(j, "constant");
  spec.favour_first = Get<double>(j, "favourFirst", 0.5);
  Instance out{GenerateInstance(spec, seed), std::nullopt, std::nullopt};
  if (j.contains("spread")) {
    out.external = GenerateExternalForSpread(out.values, Get<double>(j, "spread", 0.0), seed).B;
  }
  if (j.contains("c")) out.c = Get<double>(j, "c", 0.0);
  return out;
}

int CmdGenerate(const Common& common, std::ostream& out) {
  const Json j = ParseConfig(common.config);
  CheckKeys(j, kGeneratorKeys, "generator config");
  const std::uint64_t seed = common.seed.value_or(Get<std::uint64_t>(j, "seed", 0));
  const Instance instance = GenerateFrom(j, seed);
  const fs::path path = OutDir(common) / "instance.json";
  WriteFile(path.string(), InstanceJson(instance));
  out << "wrote " << path.string() << "\n";
  return kExitCertified;
}

// ---------------------------------------------------------------------------
// Single solve

struct SolveOutcome {
  EquilibriumSolution eq;
  std::vector<BoundReport> reports;
  std::optional<SyntheticCommitment> commitment;
  InstanceStats stats;
  bool certified = false;
};

SolveOutcome SolveInstance(const Instance& instance, std::uint64_t seed, bool certify) {
  const ValueProfile& values = instance.values;
  const MechanismParams params = instance.c ? MechanismParams::Create(*instance.c, values)
                                            : MechanismParams::HalfMaxValue(values);
  SolveOptions options;
  options.compute_br_slack = certify;

  SolveOutcome out;
  CertifyOptions certify_options;
  if (instance.external) {
    const ExternalWelfare ext = ExternalWelfare::Truthful(*instance.external);
    certify_options.external = ext;
    SyntheticCommitment cm = Commit(values.aggregates(), ext.Bhat, params);
    const VoteProfile votes = FocalVotes(values, cm, params);
    const EquilibriumCheck check =
        VerifyEquilibrium(votes, values, params, cm.a_mech, certify);
    out.eq.votes = votes;
    out.eq.aggregates = cm.aggregates;
    out.eq.p = cm.p;
    out.eq.foc_residual = check.foc_residual;
    out.eq.br_slack = check.br_slack;
    out.eq.status =
        check.foc_residual <= kFocTol ? SolveStatus::kConverged : SolveStatus::kMaxIterations;
    out.commitment = std::move(cm);
    out.reports = CertifyInstance(out.eq, values, params, certify_options);
  } else if (values.alternatives() == 2) {
    out.eq = SolveEquilibrium(values, params, options);
    out.reports = CertifyInstance(out.eq, values, params);
  } else {
    // Every distinct equilibrium found; the worst pPoA one is reported.
    std::vector<EquilibriumSolution> all =
        SolveEquilibria(values, params, kMultiStarts, seed, options);
    if (all.empty()) {
      throw Error(ErrorCode::kSolverFailure, "no equilibrium found", "solve");
    }
    std::size_t worst = 0;
    for (std::size_t e = 1; e < all.size(); ++e) {
      if (Ppoa(all[e].p, values.aggregates()) < Ppoa(all[worst].p, values.aggregates())) {
        worst = e;
      }
    }
    out.eq = std::move(all[worst]);
    out.reports = CertifyInstance(out.eq, values, params);
  }
  out.stats = ComputeStats(values, certify_options.external);
  out.certified = certify && out.eq.status == SolveStatus::kConverged &&
                  out.eq.foc_residual <= kFocTol && out.eq.br_slack <= kBrTol &&
                  AllCertifiedHold(out.reports, kMarginTol);
  return out;
}

int CmdSolve(const Common& common, std::ostream& out) {
  Instance instance = ParseInstance(ReadFile(common.config));
  const std::uint64_t seed = common.seed.value_or(0);
  const SolveOutcome r = SolveInstance(instance, seed, common.certified_mode());
  if (r.eq.status != SolveStatus::kConverged) {
    throw Error(ErrorCode::kSolverFailure,
                "equilibrium solver did not converge (residual " +
                    FormatReal(r.eq.foc_residual) + ")",
                "solve");
  }
  const MechanismParams params = instance.c
                                     ? MechanismParams::Create(*instance.c, instance.values)
                                     : MechanismParams::HalfMaxValue(instance.values);
  const fs::path dir = OutDir(common);
  WriteFile((dir / "certificate.json").string(),
            CertificateJson(r.eq, params, r.stats, seed, r.certified));
  WriteFile((dir / "bounds.csv").string(), BoundCsv({{"instance", r.reports}}));
  if (r.commitment) {
    WriteFile((dir / "commitment.json").string(), CommitmentJson(*r.commitment, params));
  }
  out << (r.certified ? "certified" : "uncertified") << " focResidual="
      << FormatReal(r.eq.foc_residual) << " brSlack=" << FormatReal(r.eq.br_slack) << "\n";
  return r.certified ? kExitCertified : kExitUncertified;
}

// ---------------------------------------------------------------------------
// Sweep

const std::set<std::string> kSweepKeys = {"spreads", "perSpread", "m",     "family",
                                          "lower",   "upper",     "seed",  "favourFirst"};

struct SweepRow {
  double bucket = 0.0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string status;
  bool ok = false;
  bool certified = false;
  InstanceStats stats;
  double ppoa = 0.0;
  double p1 = 0.0;
  double foc = 0.0;
  double br = 0.0;
};

std::string Field(double x, bool present) { return present ? FormatReal(x) : ""; }

int CmdSweep(const Common& common, std::ostream& out) {
  const Json j = ParseConfig(common.config);
  CheckKeys(j, kSweepKeys, "sweep config");
  const std::vector<double> spreads = GetReals(j, "spreads");
  const auto per = Get<std::size_t>(j, "perSpread", 10);
  if (spreads.empty() || per == 0) {
    ThrowInvalid("sweep grid is empty (need nonempty \"spreads\" and perSpread >= 1)");
  }
  for (double t : spreads) {
    if (!(t >= 1.0) || !std::isfinite(t)) ThrowInvalid("spreads must be finite and >= 1");
  }
  const std::uint64_t base = common.seed.value_or(Get<std::uint64_t>(j, "seed", 0));
  GeneratorSpec spec;
  spec.m = Get<std::size_t>(j, "m", 2);
  spec.family = ParseValueFamily(Get<std::string>(j, "family", "uniform"));
  spec.lower = Get<double>(j, "lower", 0.0);
  spec.upper = Get<double>(j, "upper", 1.0);
  spec.favour_first = Get<double>(j, "favourFirst", 0.5);
  const bool certify = common.certified_mode();

  std::vector<SweepRow> rows(spreads.size() * per);
  ParallelFor(rows.size(), Jobs(common), [&](std::size_t r) {
    SweepRow& row = rows[r];
    row.bucket = spreads[r / per];
    row.seed = RowSeed(base, r);
    GeneratorSpec s = spec;
    // Roughly two agents per unit of spread for values on [0, 1].
    s.n = static_cast<std::size_t>(std::max(1.0, std::ceil(2.0 * row.bucket)));
    row.n = s.n;
    row.m = s.m;
    try {
      const Instance instance{GenerateInstance(s, row.seed), std::nullopt, std::nullopt};
      const SolveOutcome o = SolveInstance(instance, row.seed, certify);
      row.stats = o.stats;
      row.ppoa = Ppoa(o.eq.p, instance.values.aggregates());
      row.p1 = o.eq.p(static_cast<Eigen::Index>(o.stats.order[0]));
      row.foc = o.eq.foc_residual;
      row.br = o.eq.br_slack;
      row.status = std::string(SolveStatusName(o.eq.status));
      row.ok = o.eq.status == SolveStatus::kConverged;
      row.certified = o.certified;
    } catch (const Error& e) {
      row.status = std::string(ErrorCodeName(e.code()));
    }
  });

  std::string csv = CsvHeader(
      "sweep", {"instance", "bucket", "seed", "n", "m", "T", "G", "D", "ppoa", "p1",
                "boundSpread", "boundGap", "boundM", "marginSpread", "marginGap",
                "marginM", "focResidual", "brSlack", "status", "certified"});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const SweepRow& row = rows[r];
    const bool two = row.ok && row.m == 2;
    const bool gap = two && row.stats.gap > 0.0;
    const double bs = two ? BoundSpread(row.stats.spread) : 0.0;
    const double bg = gap ? BoundGap(row.stats.gap) : 0.0;
    const double bm = row.ok ? BoundM(row.m) : 0.0;
    csv += std::to_string(r) + "," + FormatReal(row.bucket) + "," +
           std::to_string(row.seed) + "," + std::to_string(row.n) + "," +
           std::to_string(row.m) + "," + Field(row.stats.spread, row.ok) + "," +
           Field(row.stats.gap, row.ok) + "," +
           Field(row.stats.disagreement.value_or(0.0),
                 row.ok && row.stats.disagreement.has_value()) +
           "," + Field(row.ppoa, row.ok) + "," + Field(row.p1, row.ok) + "," +
           Field(bs, two) + "," + Field(bg, gap) + "," + Field(bm, row.ok) + "," +
           Field(row.ppoa - bs, two) + "," + Field(row.ppoa - bg, gap) + "," +
           Field(row.ppoa - bm, row.ok) + "," + Field(row.foc, row.ok) + "," +
           Field(row.br, row.ok) + "," + row.status + "," + (row.certified ? "1" : "0") +
           "\n";
  }

  // Per-bucket summary, compared against the bound at the smallest measured
  // spread in the bucket.
  std::string summary = CsvHeader(
      "sweep-summary", {"bucket", "count", "failures", "minT", "minPpoa", "bound", "margin"});
  bool all_certified = true;
  for (std::size_t b = 0; b < spreads.size(); ++b) {
    std::size_t ok = 0;
    double min_t = 0.0;
    double min_ppoa = 0.0;
    for (std::size_t r = b * per; r < (b + 1) * per; ++r) {
      all_certified = all_certified && rows[r].certified;
      if (!rows[r].ok) continue;
      min_t = ok ? std::min(min_t, rows[r].stats.spread) : rows[r].stats.spread;
      min_ppoa = ok ? std::min(min_ppoa, rows[r].ppoa) : rows[r].ppoa;
      ++ok;
    }
    const double bound = ok == 0 ? 0.0 : spec.m == 2 ? BoundSpread(min_t) : BoundM(spec.m);
    summary += FormatReal(spreads[b]) + "," + std::to_string(ok) + "," +
               std::to_string(per - ok) + "," + Field(min_t, ok > 0) + "," +
               Field(min_ppoa, ok > 0) + "," + Field(bound, ok > 0) + "," +
               Field(min_ppoa - bound, ok > 0) + "\n";
  }
  const fs::path dir = OutDir(common);
  WriteFile((dir / "sweep.csv").string(), csv);
  WriteFile((dir / "summary.csv").string(), summary);
  out << summary;
  return all_certified ? kExitCertified : kExitUncertified;
}

// ---------------------------------------------------------------------------
// SQUAP

const std::set<std::string> kSquapKeys = {
    "instance",  "generate",         "aggregation",     "epsilon",  "c",
    "redistribute", "manipulate",    "manipulator",     "forecasters", "initial",
    "outcomeVariance", "weighting",  "variant",         "manipulationGrid", "seed",
    "grid"};

SquapConfig ReadSquapConfig(const Json& j, std::uint64_t seed) {
  SquapConfig cfg;
  cfg.kind = ParseAggregationKind(Get<std::string>(j, "aggregation", "market"));
  cfg.epsilon = Get<double>(j, "epsilon", 1.0);
  if (j.contains("c")) cfg.c = Get<double>(j, "c", 0.0);
  cfg.redistribute = Get<bool>(j, "redistribute", false);
  cfg.seed = seed;
  cfg.manipulate = Get<bool>(j, "manipulate", false);
  if (j.contains("manipulator")) cfg.manipulator = Get<std::size_t>(j, "manipulator", 0);
  if (j.contains("initial")) cfg.initial = GetVector(j, "initial");
  cfg.forecasters = Get<std::size_t>(j, "forecasters", 2);
  if (j.contains("outcomeVariance")) cfg.outcome_variance = GetVector(j, "outcomeVariance");
  cfg.weighting = ParseWeighting(Get<std::string>(j, "weighting", "importance"));
  cfg.manipulation_grid = Get<int>(j, "manipulationGrid", 0);
  return cfg;
}

bool Practical(const Json& j) {
  const std::string variant = Get<std::string>(j, "variant", "impractical");
  if (variant != "impractical" && variant != "practical") {
    ThrowInvalid("\"variant\" must be impractical or practical");
  }
  return variant == "practical";
}

SquapRun RunOne(const Instance& instance, const SquapConfig& cfg, bool practical) {
  if (!instance.external) ThrowInvalid("SQUAP needs external welfare \"B\"");
  SquapConfig c = cfg;
  if (instance.c && !c.c) c.c = instance.c;
  return practical ? RunPracticalSquap(instance.values, *instance.external, c)
                   : RunImpracticalSquap(instance.values, *instance.external, c);
}

int CmdSquap(const Common& common, std::ostream& out) {
  const Json j = ParseConfig(common.config);
  CheckKeys(j, kSquapKeys, "squap config");
  const std::uint64_t seed = common.seed.value_or(Get<std::uint64_t>(j, "seed", 0));
  const bool practical = Practical(j);
  const SquapConfig cfg = ReadSquapConfig(j, seed);
  const fs::path dir = OutDir(common);
  const bool certify = common.certified_mode();

  if (j.contains("instance") == j.contains("generate")) {
    ThrowInvalid("squap config needs exactly one of \"instance\" and \"generate\"");
  }

  if (!j.contains("grid")) {
    Instance instance = [&] {
      if (j.contains("generate")) {
        CheckKeys(j["generate"], kGeneratorKeys, "generate block");
        return GenerateFrom(j["generate"], seed);
      }
      const Json& inst = j["instance"];
      if (inst.is_string()) {
        fs::path p(inst.get<std::string>());
        if (p.is_relative()) p = fs::path(common.config).parent_path() / p;
        return LoadInstance(p.string());
      }
      return ParseInstance(inst.dump());
    }();
    SquapRun run = RunOne(instance, cfg, practical);
    if (!certify) run.certified = false;
    WriteFile((dir / "squap_run.json").string(), SquapRunJson(run));
    WriteFile((dir / "transcript.jsonl").string(), TranscriptJsonl(run));
    WriteFile((dir / "bounds.csv").string(), BoundCsv({{"run", run.bounds}}));
    out << (run.certified ? "certified" : "uncertified")
        << " welfareRatio=" << FormatReal(run.welfare / run.optimal_welfare)
        << " deviation=" << FormatReal(run.deviation) << "\n";
    return run.certified ? kExitCertified : kExitUncertified;
  }

  // Batch over a spread x epsilon grid of generated instances.
  if (!j.contains("generate")) ThrowInvalid("\"grid\" requires a \"generate\" block");
  const Json& gen = j["generate"];
  CheckKeys(gen, kGeneratorKeys, "generate block");
  const Json& grid = j["grid"];
  CheckKeys(grid, {"spreads", "epsilons", "perCell"}, "grid");
  const std::vector<double> spreads = GetReals(grid, "spreads");
  const std::vector<double> epsilons = GetReals(grid, "epsilons");
  const auto per = Get<std::size_t>(grid, "perCell", 1);
  if (spreads.empty() || epsilons.empty() || per == 0) ThrowInvalid("squap grid is empty");

  const std::size_t cells = spreads.size() * epsilons.size();
  std::vector<std::string> lines(cells * per);
  std::vector<std::pair<std::string, std::vector<BoundReport>>> reports(cells * per);
  std::vector<char> certified(cells * per, 0);
  ParallelFor(lines.size(), Jobs(common), [&](std::size_t r) {
    const std::size_t cell = r / per;
    const double t = spreads[cell / epsilons.size()];
    const double eps = epsilons[cell % epsilons.size()];
    const std::uint64_t row_seed = RowSeed(seed, r);
    Json g = gen;
    g["spread"] = t;
    // No more agents than the spread, so the external impacts stay nonnegative.
    if (!gen.contains("n")) {
      g["n"] = static_cast<std::size_t>(std::max(2.0, std::floor(t / 2.0)));
    }
    const Instance instance = GenerateFrom(g, row_seed);
    SquapConfig c = cfg;
    c.epsilon = eps;
    c.seed = row_seed;
    SquapRun run = RunOne(instance, c, practical);
    if (!certify) run.certified = false;
    lines[r] = SquapRunJson(run, true);
    reports[r] = {std::to_string(r), run.bounds};
    certified[r] = run.certified ? 1 : 0;
  });
  std::string jsonl;
  for (const std::string& l : lines) jsonl += l;
  WriteFile((dir / "squap_runs.jsonl").string(), jsonl);
  WriteFile((dir / "bounds.csv").string(), BoundCsv(reports));
  const auto n_cert = static_cast<std::size_t>(std::count(certified.begin(), certified.end(), 1));
  out << n_cert << "/" << certified.size() << " runs certified\n";
  return n_cert == certified.size() ? kExitCertified : kExitUncertified;
}

int ExitFor(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kSolverFailure:
      return kExitSolver;
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDegenerateInstance:
      return kExitUsage;
  }
  return kExitSolver;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qtmlab: quadratic transfers mechanism toolkit", "qtmlab"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  std::optional<int> jobs;
  app.add_option("--config", common.config, "Config or instance JSON path")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Base seed (overrides the config)");
  app.add_option("--out", common.out, "Output directory");
  app.add_option("--jobs", jobs, "Worker threads (default: QTMLAB_JOBS or 1)");
  app.add_option("--mode", common.mode, "certified or measure")
      ->check(CLI::IsMember({"certified", "measure"}));

  auto* generate = app.add_subcommand("generate", "Generate a random instance");
  auto* solve = app.add_subcommand("solve", "Solve and certify one instance");
  auto* sweep = app.add_subcommand("sweep", "Certified sweep over a spread grid");
  auto* squap = app.add_subcommand("squap", "Run the two-stage mechanism");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }
  common.jobs = jobs;
  if (common.config.empty()) {
    err << "qtmlab: --config is required\n";
    return kExitUsage;
  }

  try {
    Jobs(common);
    if (generate->parsed()) return CmdGenerate(common, out);
    if (solve->parsed()) return CmdSolve(common, out);
    if (sweep->parsed()) return CmdSweep(common, out);
    if (squap->parsed()) return CmdSquap(common, out);
  } catch (const Error& e) {
    err << "qtmlab: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return ExitFor(e);
  } catch (const fs::filesystem_error& e) {
    err << "qtmlab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "qtmlab: internal error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitUsage;
}

}  // namespace qtmlab::cli
