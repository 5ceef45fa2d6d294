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

#include <string>

#include <benchmark/benchmark.h>

#include "binmwf/scene.hpp"
#include "binmwf/solver.hpp"

namespace {

struct Fixture {
  binmwf::SceneSignals scene;
  binmwf::CoherenceSet phi;
  binmwf::Selector q;
  binmwf::StftConfig stft;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    binmwf::SceneSpec spec;
    spec.noise_azimuth = 30.0;
    out.scene = binmwf::synthesize_scene(binmwf::synthetic_speech(4.0, out.stft.sample_rate, 3), spec,
                                         binmwf::ArrayGeometry{}, out.stft);
    out.phi = binmwf::estimate_coherence(out.scene.y, out.scene.vad);
    out.q = binmwf::Selector::from_geometry(binmwf::ArrayGeometry{});
    return out;
  }();
  return f;
}

void BM_EstimateCoherence(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(binmwf::estimate_coherence(f.scene.y, f.scene.vad));
}
BENCHMARK(BM_EstimateCoherence)->Unit(benchmark::kMillisecond);

void BM_ClosedForm(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(binmwf::mwf_closed_form(f.phi, f.q));
}
BENCHMARK(BM_ClosedForm)->Unit(benchmark::kMicrosecond);

// One bin at 500 Hz, argument selects the variant.
void BM_SolveBin(benchmark::State& state) {
  const auto& f = fixture();
  binmwf::CostSpec spec;
  spec.variant = static_cast<binmwf::Variant>(state.range(0));
  spec.alpha = 1000.0;
  const auto bin = binmwf::BinCoherence::of(f.phi, 8, f.stft);
  const binmwf::SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(binmwf::solve_bin(spec, bin, f.q, cfg));
  state.SetLabel(std::string(binmwf::variant_name(spec.variant)));
}
BENCHMARK(BM_SolveBin)
    ->Arg(static_cast<int>(binmwf::Variant::kMwfItd))
    ->Arg(static_cast<int>(binmwf::Variant::kMwfIc))
    ->Unit(benchmark::kMicrosecond);

void BM_SolveAllBins(benchmark::State& state) {
  const auto& f = fixture();
  binmwf::CostSpec spec;
  spec.variant = binmwf::Variant::kMwfIc;
  spec.alpha = 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(binmwf::solve(spec, f.phi, f.q, f.stft, binmwf::SolverConfig{}));
}
BENCHMARK(BM_SolveAllBins)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
