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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace binmwf {

using Complex = std::complex<double>;

enum class WindowKind {
  kSqrtHann,     // periodic sqrt-Hann on analysis and synthesis
  kRectangular,  // analysis only; synthesis uses the matching COLA weight
};

struct StftConfig {
  std::size_t fft_size = 256;
  std::size_t window_len = 128;
  std::size_t hop = 64;
  double sample_rate = 16000.0;
  WindowKind window = WindowKind::kSqrtHann;

  std::size_t bin_count() const { return fft_size / 2 + 1; }
  double bin_frequency(std::size_t k) const {
    return sample_rate * static_cast<double>(k) / static_cast<double>(fft_size);
  }
  /// Throws InvalidInput unless the configuration admits perfect WOLA
  /// reconstruction.
  void validate() const;
};

/// Analysis and synthesis windows for a configuration. Their product summed
/// over hop shifts is one everywhere.
struct WindowPair {
  std::vector<double> analysis;
  std::vector<double> synthesis;
};
WindowPair make_windows(const StftConfig& cfg);

/// One-sided STFT coefficients indexed (channel, frame, bin).
class SpectralTensor {
 public:
  SpectralTensor() = default;
  SpectralTensor(std::size_t channels, std::size_t frames, const StftConfig& cfg);

  std::size_t channels() const { return channels_; }
  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  const StftConfig& config() const { return cfg_; }
  bool empty() const { return data_.empty(); }

  Complex& at(std::size_t m, std::size_t frame, std::size_t k) {
    return data_[(m * frames_ + frame) * bins_ + k];
  }
  const Complex& at(std::size_t m, std::size_t frame, std::size_t k) const {
    return data_[(m * frames_ + frame) * bins_ + k];
  }

  /// Spectrum of one channel in one frame.
  std::span<Complex> frame(std::size_t m, std::size_t frame) {
    return {data_.data() + (m * frames_ + frame) * bins_, bins_};
  }
  std::span<const Complex> frame(std::size_t m, std::size_t frame) const {
    return {data_.data() + (m * frames_ + frame) * bins_, bins_};
  }

  /// All channels at (frame, k) as an M-vector.
  Eigen::VectorXcd snapshot(std::size_t frame, std::size_t k) const;

  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  SpectralTensor& operator+=(const SpectralTensor& other);
  SpectralTensor& operator*=(double gain);

  /// Single-channel view copied out of this tensor.
  SpectralTensor channel(std::size_t m) const;

 private:
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  StftConfig cfg_;
  std::vector<Complex> data_;
};

SpectralTensor operator+(SpectralTensor a, const SpectralTensor& b);

using MultichannelAudio = std::vector<std::vector<double>>;

std::size_t frame_count(std::size_t length, const StftConfig& cfg);

/// Windowed, zero-padded one-sided STFT of every channel. Only full windows
/// are analyzed.
SpectralTensor analyze(const MultichannelAudio& audio, const StftConfig& cfg);

/// Weighted overlap-add resynthesis. Output length is
/// (frames - 1) * hop + window_len.
MultichannelAudio synthesize(const SpectralTensor& spec);

}  // namespace binmwf
