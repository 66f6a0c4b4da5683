// Copyright 2026 The specshare Authors
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

#include "specshare/aipc.hpp"
#include "specshare/capacity.hpp"
#include "specshare/pclc.hpp"
#include "specshare/pu_policy.hpp"

namespace {

using namespace specshare;

FadingEnsemble prepared(std::size_t n) {
  FadingEnsemble ens =
      sample_ensemble(ChannelDistribution{1.0, 1.0, 0.5, 0.01}, n, 99);
  apply_pu_policy(ens, make_cp_policy(10.0));
  return ens;
}

void BM_SampleEnsemble(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ChannelDistribution dist;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_ensemble(dist, n, 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleEnsemble)->Arg(10000)->Arg(100000);

void BM_CapacityEval(benchmark::State& state) {
  const FadingEnsemble ens = prepared(
      static_cast<std::size_t>(state.range(0)));
  const std::vector<double> p(ens.size(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(primary_capacity(ens, p));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CapacityEval)->Arg(100000);

void BM_PclcPowerRoot(benchmark::State& state) {
  const FadingEnsemble ens = prepared(4096);
  const DualPair duals{3.8, 0.012};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pclc_power(ens.states[i], duals));
    i = (i + 1) % ens.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PclcPowerRoot);

void BM_SolveAipc(benchmark::State& state) {
  const FadingEnsemble ens = prepared(
      static_cast<std::size_t>(state.range(0)));
  SolverOptions opts;
  opts.method = DualMethod::kBisection;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_aipc(ens, {0.3, 10.0}, opts));
  }
}
BENCHMARK(BM_SolveAipc)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SolvePclc(benchmark::State& state) {
  const FadingEnsemble ens = prepared(
      static_cast<std::size_t>(state.range(0)));
  const PclcProblem prob =
      make_pclc_problem(ens, 0.05 * primary_capacity_max(ens), 10.0);
  SolverOptions opts;
  opts.method = DualMethod::kBisection;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_pclc(ens, prob, opts));
  }
}
BENCHMARK(BM_SolvePclc)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
