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

#pragma once

#include <filesystem>
#include <vector>

namespace binmwf {

enum class SampleFormat { kPcm16, kFloat32 };

/// Deinterleaved audio with samples in [-1, 1].
struct WavData {
  double sample_rate = 0.0;
  std::vector<std::vector<double>> channels;

  std::size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// Reads 16-bit PCM or 32-bit float WAV (plain or WAVE_FORMAT_EXTENSIBLE).
/// Throws IoError on unreadable files or unsupported encodings.
WavData read_wav(const std::filesystem::path& path);

/// Reads a WAV and requires its sample rate to equal `expected_rate`.
WavData read_wav(const std::filesystem::path& path, double expected_rate);

void write_wav(const std::filesystem::path& path, const WavData& wav,
               SampleFormat format = SampleFormat::kFloat32);

}  // namespace binmwf
