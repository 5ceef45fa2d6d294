// Copyright 2026 The binmwf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <complex>

#include <benchmark/benchmark.h>

#include "binmwf/phase_model.hpp"

namespace {

binmwf::RatioPhaseParams params() {
  binmwf::RatioPhaseParams p;
  p.rho = std::polar(0.9, 0.7853981633974483);
  return p;
}

void BM_PhasePdf(benchmark::State& state) {
  const auto p = params();
  double theta = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(binmwf::phase_pdf(theta, p));
    theta = theta > 3.0 ? -3.0 : theta + 1e-3;
  }
}
BENCHMARK(BM_PhasePdf);

void BM_SampleRatioPhase(benchmark::State& state) {
  const auto p = params();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(binmwf::sample_ratio_phase(p, n, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleRatioPhase)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
