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

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "binmwf/stft.hpp"
#include "binmwf/wav.hpp"

namespace binmwf {

enum class Ear { kLeft = 0, kRight = 1 };

inline const char* ear_name(Ear e) { return e == Ear::kLeft ? "left" : "right"; }

/// Two behind-the-ear devices, each a short end-fire line of microphones
/// pointing forward. Channel order is L1..L_n, R1..R_n; the first (front)
/// microphone of each device is its reference.
struct ArrayGeometry {
  std::size_t mics_per_ear = 3;
  double intra_array_spacing = 0.0076;  // m
  double head_radius = 0.0875;          // m
  double sound_speed = 343.0;           // m/s

  std::size_t channel_count() const { return 2 * mics_per_ear; }
  std::size_t reference_index(Ear e) const { return e == Ear::kLeft ? 0 : mics_per_ear; }
  void validate() const;
};

struct SceneSpec {
  double speech_azimuth = 0.0;  // degrees, negative = left
  double noise_azimuth = 30.0;
  double speech_distance = 0.8;  // m
  double noise_distance = 3.0;
  double target_snr_worst_ear = 0.0;  // dB
  double noise_cutoff = 1500.0;       // Hz
  /// Spatially white microphone self-noise, dB relative to the broadband
  /// power of the directional noise at the worst-ear reference microphone.
  /// Use -infinity to disable.
  double sensor_noise_db = -30.0;
  double vad_threshold_db = 40.0;
  std::uint64_t seed = 1;

  void validate(const StftConfig& cfg) const;
};

/// Free-field transfer vectors of one source, one M-vector per bin.
struct SteeringVectorSet {
  std::vector<Eigen::VectorXcd> h;
};

struct VadLabels {
  std::vector<bool> active;

  std::size_t active_count() const;
  std::size_t inactive_count() const { return active.size() - active_count(); }
};

/// Woodworth far-field interaural delay (a/c)(theta + sin theta) in seconds.
double woodworth_itd(double azimuth_rad, const ArrayGeometry& geometry);

/// Per-channel arrival delay relative to the head center, in seconds.
std::vector<double> arrival_delays(const ArrayGeometry& geometry, double azimuth_deg);

/// First-order spherical-head shadow magnitude for an ear at incidence angle
/// `incidence_rad` (0 = source on the ear axis).
double head_shadow_gain(double frequency, double incidence_rad, const ArrayGeometry& geometry);

SteeringVectorSet steering_vector(const ArrayGeometry& geometry, double azimuth_deg,
                                  double distance, const StftConfig& cfg);

/// Windowed-sinc (Blackman) linear-phase low-pass taps, unity DC gain.
std::vector<double> design_lowpass(double cutoff_hz, double sample_rate, std::size_t taps = 1023);

/// Zero-delay ("same" length) convolution with a linear-phase FIR.
std::vector<double> filter_same(const std::vector<double>& signal, const std::vector<double>& taps);

/// Full linear convolution, output length signal + taps - 1 truncated to
/// `length` samples.
std::vector<double> convolve(const std::vector<double>& signal, const std::vector<double>& taps,
                             std::size_t length);

std::vector<double> white_noise(std::size_t length, std::uint64_t seed);

VadLabels ideal_vad(const SpectralTensor& clean_speech, double threshold_db);

/// Multichannel impulse responses for one source position, channel order
/// L1..L_n, R1..R_n.
struct ImpulseResponses {
  std::vector<std::vector<double>> channels;
  static ImpulseResponses from_wav(const WavData& wav, const ArrayGeometry& geometry,
                                   double sample_rate);
};

struct SceneSignals {
  SpectralTensor y;
  SpectralTensor x;
  SpectralTensor v;
  VadLabels vad;
  SteeringVectorSet speech_steering;
  SteeringVectorSet noise_steering;
  double noise_gain = 0.0;
  Ear worst_ear = Ear::kRight;
  std::array<double, 2> input_snr_db{};  // left, right, over speech-active frames
};

struct SceneSources {
  std::optional<ImpulseResponses> speech_ir;
  std::optional<ImpulseResponses> noise_ir;
};

/// Renders speech and low-passed directional noise at the array, calibrates
/// the worst-ear SNR and labels speech activity. With no impulse responses
/// the sources are applied through their steering vectors bin by bin.
SceneSignals synthesize_scene(const std::vector<double>& speech, const SceneSpec& spec,
                              const ArrayGeometry& geometry, const StftConfig& cfg,
                              const SceneSources& sources = {});

/// Speech-like test signal: voiced syllables with formant structure and
/// occasional fricatives, separated by pauses, with silent lead-in and tail.
std::vector<double> synthetic_speech(double duration_s, double sample_rate, std::uint64_t seed);

}  // namespace binmwf
