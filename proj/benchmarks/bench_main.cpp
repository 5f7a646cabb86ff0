// SPDX-License-Identifier: Apache-2.0
//
// gridless-isac: sparse Bayesian ISAC receiver and benchmark harness
// Copyright (C) 2026 The gridless-isac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Microbenchmarks for the hot paths: atom synthesis, the mini-batch
// gradient, grid correlation and the classical information matrix.

#include <benchmark/benchmark.h>

#include "isac/baselines.hpp"
#include "isac/bcrb.hpp"
#include "isac/posterior.hpp"
#include "isac/scenario.hpp"

namespace {

using namespace isac;

struct Setup {
  ScenarioConfig sc = preset("single-target");
  Rng rng{7};
  CTensor3 x = generate_symbols(sc.system, rng);
  Target t = Target::from_kinematics(231.7, -12.3, 0.37, {1.0, 0.0}, sc.system);
  std::vector<cplx> y = noiseless_echo(std::vector<Target>{t}, x, sc.system);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

void BM_Atom(benchmark::State& state) {
  const Setup& s = setup();
  for (auto _ : state) {
    benchmark::DoNotOptimize(atom(s.t.delay_s, s.t.doppler_hz, s.t.angle_rad, s.x, s.sc.system));
  }
}
BENCHMARK(BM_Atom);

void BM_TemperedGradient(benchmark::State& state) {
  const Setup& s = setup();
  const PriorConfig pc = s.sc.prior();
  ParamState eta(pc.q);
  for (std::size_t i = 0; i < pc.q; ++i) {
    eta.delay[i] = pc.delay.mean;
    eta.doppler[i] = pc.doppler.mean;
    eta.angle[i] = pc.angle.mean;
    eta.b_re[i] = 0.1;
    eta.rho[i] = 1.0;
  }
  const auto b = static_cast<std::size_t>(state.range(0));
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < b; ++i) idx.push_back(i * (s.y.size() / b));
  const MiniBatch batch = MiniBatch::from_indices(s.y, idx);
  const double gamma = gamma_exponent(b, s.y.size(), 0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_tempered(eta, batch, pc, s.x, s.sc.system, gamma, true));
  }
}
BENCHMARK(BM_TemperedGradient)->Arg(128)->Arg(1024);

void BM_GridCorrelate(benchmark::State& state) {
  const Setup& s = setup();
  const PriorConfig pc = s.sc.prior();
  const GridSpec grid = GridSpec::per_cell(s.sc.system, pc.delay.support, pc.doppler.support, pc.angle.support, 1.0);
  const GridCorrelator corr(grid, s.x, s.sc.system);
  for (auto _ : state) benchmark::DoNotOptimize(corr.correlate(s.y));
  state.counters["grid_points"] = static_cast<double>(grid.size());
}
BENCHMARK(BM_GridCorrelate);

void BM_ClassicalFim(benchmark::State& state) {
  const Setup& s = setup();
  std::vector<Target> ts;
  for (int l = 0; l < state.range(0); ++l)
    ts.push_back(Target::from_kinematics(100.0 + 40.0 * l, 5.0 * l, 0.1 * l, {1.0, 0.0}, s.sc.system));
  for (auto _ : state) benchmark::DoNotOptimize(classical_fim(ts, s.x, 1.0, s.sc.system));
}
BENCHMARK(BM_ClassicalFim)->Arg(1)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
