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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "binmwf/stft.hpp"

namespace {

binmwf::MultichannelAudio random_audio(std::size_t channels, std::size_t length) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n(0.0, 1.0);
  binmwf::MultichannelAudio audio(channels, std::vector<double>(length));
  for (auto& ch : audio)
    for (auto& s : ch) s = n(gen);
  return audio;
}

void BM_Analyze(benchmark::State& state) {
  const binmwf::StftConfig cfg;
  const auto audio = random_audio(6, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(binmwf::analyze(audio, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 6);
}
BENCHMARK(BM_Analyze)->Arg(16000)->Arg(96000);

void BM_Synthesize(benchmark::State& state) {
  const binmwf::StftConfig cfg;
  const auto spec = binmwf::analyze(random_audio(2, static_cast<std::size_t>(state.range(0))), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(binmwf::synthesize(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_Synthesize)->Arg(16000)->Arg(96000);

}  // namespace

BENCHMARK_MAIN();
