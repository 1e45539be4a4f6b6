// Copyright 2026 The qtraj Authors
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

#include "qtraj/apd.hpp"
#include "qtraj/dpo.hpp"
#include "qtraj/homodyne.hpp"
#include "qtraj/master_equation.hpp"
#include "qtraj/noise.hpp"

using namespace qtraj;

static void BM_MasterEquationStep(benchmark::State& state) {
  SystemParams sys{10.0, 1.0};
  Mat2 rho = DensityOperator::ground().matrix();
  for (auto _ : state) {
    rho = me_step(sys, rho, 1e-4);
    benchmark::DoNotOptimize(rho);
  }
}
BENCHMARK(BM_MasterEquationStep);

static void BM_PerfectHomodyneKetStep(benchmark::State& state) {
  SystemParams sys{10.0, 1.0};
  HomodyneOperators ops = homodyne_operators(sys, lo_phase(Quadrature::x));
  NoiseStream w(1, 0, 11);
  Ket psi(0.0, 1.0);
  const double dt = 1e-5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(perfect_homodyne_step(psi, ops, dt, w.wiener(dt)));
  }
}
BENCHMARK(BM_PerfectHomodyneKetStep);

static void BM_ApdTripleStep(benchmark::State& state) {
  SystemParams sys{10.0, 1.0};
  auto scheme = state.range(0) == 0 ? CountingScheme::direct : CountingScheme::adaptive;
  ApdTripleSimulator sim(sys, ApdParams{}, scheme, 1e-4, 1);
  for (auto _ : state) sim.step();
  state.SetLabel(state.range(0) == 0 ? "direct" : "adaptive");
}
BENCHMARK(BM_ApdTripleStep)->Arg(0)->Arg(1);

// Homodyne triple step; the realistic observer dominates through its voltage
// grid, so the cost scales with the number of grid points.
static void BM_HomodyneGridStep(benchmark::State& state) {
  SystemParams sys{10.0, 1.0};
  GridOptions grid;
  grid.points = static_cast<std::size_t>(state.range(0));
  HomodyneTripleSimulator sim(sys, PrParams{}, 1e-5, 1, 0, grid);
  for (auto _ : state) sim.step();
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HomodyneGridStep)->Arg(50)->Arg(100)->Arg(200)->Complexity(benchmark::oN);

static void BM_DpoSteadyCovariances(benchmark::State& state) {
  DpoParams p{0.5, 0.1, 1e-4, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(steady_covariances(p));
}
BENCHMARK(BM_DpoSteadyCovariances);
BENCHMARK_MAIN();
