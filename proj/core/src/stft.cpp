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

#include "binmwf/stft.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "binmwf/error.hpp"

namespace binmwf {
namespace {

// Owns an FFTW plan pair and the aligned buffers they operate on.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    time_ = fftw_alloc_real(n);
    freq_ = fftw_alloc_complex(n / 2 + 1);
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), time_, freq_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq_, time_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(time_);
    fftw_free(freq_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* time() { return time_; }
  Complex* freq() { return reinterpret_cast<Complex*>(freq_); }
  void forward() { fftw_execute(forward_); }
  // Unnormalized; callers divide by n.
  void inverse() { fftw_execute(inverse_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  double* time_ = nullptr;
  fftw_complex* freq_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace

void StftConfig::validate() const {
  if (fft_size < 2 || fft_size % 2 != 0) {
    throw InvalidInput("stft: fft_size must be even and >= 2");
  }
  if (window_len == 0 || window_len > fft_size) {
    throw InvalidInput("stft: window_len must be in [1, fft_size]");
  }
  if (hop == 0 || window_len % hop != 0) {
    throw InvalidInput("stft: hop must divide window_len");
  }
  if (!(sample_rate > 0.0)) {
    throw InvalidInput("stft: sample_rate must be positive");
  }
  if (window == WindowKind::kSqrtHann && window_len != 2 * hop) {
    // Periodic Hann sums to one only at 50% overlap.
    throw InvalidInput("stft: sqrt-Hann window requires hop = window_len / 2");
  }
}

WindowPair make_windows(const StftConfig& cfg) {
  WindowPair w;
  w.analysis.resize(cfg.window_len);
  w.synthesis.resize(cfg.window_len);
  const double n = static_cast<double>(cfg.window_len);
  for (std::size_t i = 0; i < cfg.window_len; ++i) {
    switch (cfg.window) {
      case WindowKind::kSqrtHann: {
        const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / n);
        w.analysis[i] = std::sqrt(hann);
        w.synthesis[i] = w.analysis[i];
        break;
      }
      case WindowKind::kRectangular:
        w.analysis[i] = 1.0;
        w.synthesis[i] = static_cast<double>(cfg.hop) / n;
        break;
    }
  }
  return w;
}

SpectralTensor::SpectralTensor(std::size_t channels, std::size_t frames, const StftConfig& cfg)
    : channels_(channels),
      frames_(frames),
      bins_(cfg.bin_count()),
      cfg_(cfg),
      data_(channels * frames * cfg.bin_count()) {}

Eigen::VectorXcd SpectralTensor::snapshot(std::size_t frame, std::size_t k) const {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(channels_));
  for (std::size_t m = 0; m < channels_; ++m) v(static_cast<Eigen::Index>(m)) = at(m, frame, k);
  return v;
}

SpectralTensor& SpectralTensor::operator+=(const SpectralTensor& other) {
  if (other.channels_ != channels_ || other.frames_ != frames_ || other.bins_ != bins_) {
    throw InvalidInput("SpectralTensor: shape mismatch in addition");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

SpectralTensor& SpectralTensor::operator*=(double gain) {
  for (auto& c : data_) c *= gain;
  return *this;
}

SpectralTensor SpectralTensor::channel(std::size_t m) const {
  if (m >= channels_) throw InvalidInput("SpectralTensor: channel out of range");
  SpectralTensor out(1, frames_, cfg_);
  for (std::size_t f = 0; f < frames_; ++f) {
    auto src = frame(m, f);
    std::copy(src.begin(), src.end(), out.frame(0, f).begin());
  }
  return out;
}

SpectralTensor operator+(SpectralTensor a, const SpectralTensor& b) {
  a += b;
  return a;
}

std::size_t frame_count(std::size_t length, const StftConfig& cfg) {
  if (length < cfg.window_len) return 0;
  return (length - cfg.window_len) / cfg.hop + 1;
}

SpectralTensor analyze(const MultichannelAudio& audio, const StftConfig& cfg) {
  cfg.validate();
  if (audio.empty() || audio.front().empty()) {
    throw InvalidInput("analyze: empty input");
  }
  const std::size_t length = audio.front().size();
  for (const auto& ch : audio) {
    if (ch.size() != length) throw InvalidInput("analyze: channel lengths differ");
  }
  if (length < cfg.window_len) {
    throw InvalidInput("analyze: input shorter than one window (" + std::to_string(length) +
                       " < " + std::to_string(cfg.window_len) + ")");
  }

  const auto windows = make_windows(cfg);
  const std::size_t frames = frame_count(length, cfg);
  SpectralTensor out(audio.size(), frames, cfg);
  RealFft fft(cfg.fft_size);

  for (std::size_t m = 0; m < audio.size(); ++m) {
    for (std::size_t f = 0; f < frames; ++f) {
      const double* src = audio[m].data() + f * cfg.hop;
      double* buf = fft.time();
      for (std::size_t i = 0; i < cfg.window_len; ++i) buf[i] = src[i] * windows.analysis[i];
      for (std::size_t i = cfg.window_len; i < cfg.fft_size; ++i) buf[i] = 0.0;
      fft.forward();
      auto dst = out.frame(m, f);
      std::copy(fft.freq(), fft.freq() + cfg.bin_count(), dst.begin());
    }
  }
  return out;
}

MultichannelAudio synthesize(const SpectralTensor& spec) {
  const StftConfig& cfg = spec.config();
  cfg.validate();
  if (spec.channels() == 0 || spec.frames() == 0) {
    throw InvalidInput("synthesize: empty tensor");
  }
  if (spec.bins() != cfg.bin_count() ||
      spec.data().size() != spec.channels() * spec.frames() * spec.bins()) {
    throw InvalidInput("synthesize: tensor shape inconsistent with its configuration");
  }

  const auto windows = make_windows(cfg);
  const std::size_t length = (spec.frames() - 1) * cfg.hop + cfg.window_len;
  const double scale = 1.0 / static_cast<double>(cfg.fft_size);
  MultichannelAudio out(spec.channels(), std::vector<double>(length, 0.0));
  RealFft fft(cfg.fft_size);

  for (std::size_t m = 0; m < spec.channels(); ++m) {
    for (std::size_t f = 0; f < spec.frames(); ++f) {
      auto src = spec.frame(m, f);
      std::copy(src.begin(), src.end(), fft.freq());
      fft.inverse();
      double* dst = out[m].data() + f * cfg.hop;
      const double* buf = fft.time();
      for (std::size_t i = 0; i < cfg.window_len; ++i) {
        dst[i] += buf[i] * scale * windows.synthesis[i];
      }
    }
  }
  return out;
}

}  // namespace binmwf
