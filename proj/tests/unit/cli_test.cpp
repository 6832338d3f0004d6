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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"

namespace qtmlab {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "qtmlab");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Data(const std::string& name) { return std::string(QTMLAB_TEST_DATA) + "/" + name; }

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("qtmlab_cli_") + info->name());
    fs::remove_all(dir_);
    unsetenv("QTMLAB_JOBS");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("QTMLAB_JOBS");
  }
  std::string Out(const std::string& sub) const { return (dir_ / sub).string(); }

  fs::path dir_;
};

TEST_F(CliTest, SolveCertifiesBundledInstance) {
  const Result r = RunCli({"solve", "--config", Data("instance_two_alt.json"), "--out", Out("a")});
  ASSERT_EQ(r.code, cli::kExitCertified) << r.err;
  const Json cert = Json::parse(Slurp(dir_ / "a" / "certificate.json"));
  EXPECT_LT(cert["focResidual"].get<double>(), 1e-10);
  EXPECT_TRUE(cert["certified"].get<bool>());
  const std::string csv = Slurp(dir_ / "a" / "bounds.csv");
  EXPECT_EQ(csv.rfind("# qtmlab-csv schema=1 kind=bounds\n", 0), 0u);
}

TEST_F(CliTest, SolveExternalWritesCommitment) {
  const Result r = RunCli({"solve", "--config", Data("instance_external.json"), "--out", Out("a")});
  EXPECT_EQ(r.code, cli::kExitCertified) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "a" / "commitment.json"));
}

TEST_F(CliTest, MalformedJsonIsUsageErrorWithOffset) {
  const Result r = RunCli({"solve", "--config", Data("malformed.json"), "--out", Out("a")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("byte 55"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(RunCli({}).code, cli::kExitUsage);
  EXPECT_EQ(RunCli({"solve"}).code, cli::kExitUsage);
  EXPECT_EQ(RunCli({"solve", "--config", Data("nope.json")}).code, cli::kExitUsage);
  EXPECT_EQ(RunCli({"solve", "--config", Data("instance_two_alt.json"), "--mode", "fast"}).code,
            cli::kExitUsage);
  EXPECT_EQ(RunCli({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(RunCli({"--help"}).code, 0);
}

TEST_F(CliTest, UnknownConfigKeyIsRejected) {
  fs::create_directories(dir_);
  std::ofstream(dir_ / "bad.json") << R"({"spreads": [4], "perSpread": 2, "sprads": 1})";
  const Result r = RunCli({"sweep", "--config", (dir_ / "bad.json").string(), "--out", Out("a")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("sprads"), std::string::npos) << r.err;
}

TEST_F(CliTest, MeasureModeIsUncertified) {
  const Result r = RunCli({"solve", "--config", Data("instance_two_alt.json"), "--out", Out("a"),
                           "--mode", "measure"});
  EXPECT_EQ(r.code, cli::kExitUncertified);
}

TEST_F(CliTest, SolveIsDeterministic) {
  const std::string cfg = Data("instance_three_alt.json");
  ASSERT_EQ(RunCli({"solve", "--config", cfg, "--seed", "4", "--out", Out("a")}).code, 0);
  ASSERT_EQ(RunCli({"solve", "--config", cfg, "--seed", "4", "--out", Out("b")}).code, 0);
  for (const char* f : {"certificate.json", "bounds.csv"}) {
    EXPECT_EQ(Slurp(dir_ / "a" / f), Slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, GenerateHonoursSeed) {
  const std::string cfg = Data("generate.json");
  ASSERT_EQ(RunCli({"generate", "--config", cfg, "--seed", "1", "--out", Out("a")}).code, 0);
  ASSERT_EQ(RunCli({"generate", "--config", cfg, "--seed", "1", "--out", Out("b")}).code, 0);
  ASSERT_EQ(RunCli({"generate", "--config", cfg, "--seed", "2", "--out", Out("c")}).code, 0);
  const std::string a = Slurp(dir_ / "a" / "instance.json");
  EXPECT_EQ(a, Slurp(dir_ / "b" / "instance.json"));
  EXPECT_NE(a, Slurp(dir_ / "c" / "instance.json"));
  EXPECT_EQ(Json::parse(a)["values"].size(), 20u);
}

TEST_F(CliTest, SweepMeetsSpreadBoundAndIgnoresJobCount) {
  const std::string cfg = Data("sweep.json");
  ASSERT_EQ(RunCli({"sweep", "--config", cfg, "--out", Out("a"), "--jobs", "1"}).code, 0);
  ASSERT_EQ(RunCli({"sweep", "--config", cfg, "--out", Out("b"), "--jobs", "2"}).code, 0);
  setenv("QTMLAB_JOBS", "3", 1);
  ASSERT_EQ(RunCli({"sweep", "--config", cfg, "--out", Out("c")}).code, 0);
  for (const char* f : {"sweep.csv", "summary.csv"}) {
    const std::string a = Slurp(dir_ / "a" / f);
    EXPECT_EQ(a, Slurp(dir_ / "b" / f)) << f;
    EXPECT_EQ(a, Slurp(dir_ / "c" / f)) << f;
  }
  // Every summary row reports a nonnegative margin.
  std::istringstream in(Slurp(dir_ / "a" / "summary.csv"));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  const auto header = line;
  std::vector<std::string> cols;
  {
    std::stringstream hs(header);
    for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
  }
  const auto margin_col = std::find(cols.begin(), cols.end(), "margin") - cols.begin();
  ASSERT_LT(static_cast<std::size_t>(margin_col), cols.size());
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string cell;
    for (long i = 0; i <= margin_col; ++i) std::getline(ls, cell, ',');
    EXPECT_GE(std::stod(cell), 0.0) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST_F(CliTest, JobsValidation) {
  const std::string cfg = Data("sweep.json");
  EXPECT_EQ(RunCli({"sweep", "--config", cfg, "--out", Out("a"), "--jobs", "0"}).code,
            cli::kExitUsage);
  setenv("QTMLAB_JOBS", "zero", 1);
  EXPECT_EQ(RunCli({"sweep", "--config", cfg, "--out", Out("a")}).code, cli::kExitUsage);
  // The flag wins over the environment.
  EXPECT_EQ(RunCli({"sweep", "--config", cfg, "--out", Out("a"), "--jobs", "1"}).code, 0);
}

TEST_F(CliTest, EmptySweepIsUsageError) {
  EXPECT_EQ(RunCli({"sweep", "--config", Data("sweep_empty.json"), "--out", Out("a")}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, SquapRuns) {
  EXPECT_EQ(RunCli({"squap", "--config", Data("squap_market.json"), "--out", Out("m")}).code, 0);

  ASSERT_EQ(RunCli({"squap", "--config", Data("squap_manipulated.json"), "--out", Out("x")}).code,
            0);
  const Json run = Json::parse(Slurp(dir_ / "x" / "squap_run.json"));
  EXPECT_LE(run["deviation"].get<double>(), 0.1 * run["maxValue"].get<double>() * (1 + 1e-12));
  EXPECT_EQ(run["mode"], "certified");

  EXPECT_EQ(RunCli({"squap", "--config", Data("squap_wagering.json"), "--out", Out("w")}).code, 0);

  const Result p = RunCli({"squap", "--config", Data("squap_practical.json"), "--out", Out("p")});
  EXPECT_EQ(p.code, cli::kExitUncertified);
  const Json prac = Json::parse(Slurp(dir_ / "p" / "squap_run.json"));
  EXPECT_EQ(prac["mode"], "uncertified");
  EXPECT_EQ(prac["variant"], "practical");
  EXPECT_TRUE(prac.contains("manipulation"));
}

TEST_F(CliTest, SquapIsDeterministic) {
  const std::string cfg = Data("squap_wagering.json");
  ASSERT_EQ(RunCli({"squap", "--config", cfg, "--seed", "8", "--out", Out("a")}).code, 0);
  ASSERT_EQ(RunCli({"squap", "--config", cfg, "--seed", "8", "--out", Out("b")}).code, 0);
  for (const char* f : {"squap_run.json", "transcript.jsonl", "bounds.csv"}) {
    EXPECT_EQ(Slurp(dir_ / "a" / f), Slurp(dir_ / "b" / f)) << f;
  }
}

}  // namespace
}  // namespace qtmlab
