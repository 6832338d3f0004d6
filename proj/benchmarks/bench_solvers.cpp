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

#include <benchmark/benchmark.h>

#include "qtmlab/equilibrium.hpp"
#include "qtmlab/generator.hpp"
#include "qtmlab/qtm.hpp"
#include "qtmlab/squap.hpp"
#include "qtmlab/synthetic.hpp"

namespace qtmlab {
namespace {

ValueProfile Instance(std::size_t n, std::size_t m, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.n = n;
  spec.m = m;
  return GenerateInstance(spec, seed);
}

void BM_SolveTwoAlt(benchmark::State& state) {
  const ValueProfile v = Instance(static_cast<std::size_t>(state.range(0)), 2, 1);
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveEquilibrium(v, params));
  }
}
BENCHMARK(BM_SolveTwoAlt)->Arg(10)->Arg(100)->Arg(1000);

void BM_SolveFixedPoint(benchmark::State& state) {
  const ValueProfile v = Instance(50, static_cast<std::size_t>(state.range(0)), 2);
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveEquilibrium(v, params));
  }
}
BENCHMARK(BM_SolveFixedPoint)->Arg(3)->Arg(5)->Arg(10);

void BM_Hessian(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const ValueProfile v = Instance(20, m, 3);
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  const VoteProfile votes(Matrix::Zero(20, static_cast<Eigen::Index>(m)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Hessian(0, votes, v, params));
  }
}
BENCHMARK(BM_Hessian)->Arg(2)->Arg(5)->Arg(10);

void BM_SyntheticCommit(benchmark::State& state) {
  const ValueProfile v = Instance(100, 2, 4);
  const MechanismParams params = MechanismParams::HalfMaxValue(v);
  const Vector b = Vector::Constant(2, 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Commit(v.aggregates(), b, params));
  }
}
BENCHMARK(BM_SyntheticCommit);

void BM_ImpracticalSquap(benchmark::State& state) {
  const ValueProfile v = Instance(50, 2, 5);
  SquapConfig cfg;
  cfg.kind = state.range(0) ? AggregationKind::kWagering : AggregationKind::kMarket;
  cfg.manipulate = true;
  cfg.forecasters = 4;
  cfg.epsilon = 0.25;
  const Vector b = (Vector(2) << 2.0, 1.0).finished();
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunImpracticalSquap(v, b, cfg));
  }
}
BENCHMARK(BM_ImpracticalSquap)->Arg(0)->Arg(1);

}  // namespace
}  // namespace qtmlab

BENCHMARK_MAIN();
