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
#include <iosfwd>
#include <string>
#include <vector>

#include "binmwf/filter_pair.hpp"
#include "binmwf/scene.hpp"
#include "binmwf/spatial_stats.hpp"
#include "binmwf/stft.hpp"

namespace binmwf {

/// Left/right outputs of a filter bank applied separately to the speech and
/// noise components. Each tensor has two channels (left, right).
struct ShadowOutput {
  SpectralTensor x;
  SpectralTensor v;
};

/// z_L = w_L^H y and z_R = w_R^H y for every frame and bin.
SpectralTensor apply_filters(const FilterBank& filters, const SpectralTensor& y);

ShadowOutput shadow_filter(const FilterBank& filters, const SpectralTensor& x, const SpectralTensor& v);

/// The unprocessed reference channels as a two-channel tensor.
SpectralTensor reference_pair(const SpectralTensor& t, const Selector& q);

/// 10 log10 of speech over noise energy per ear, summed over speech-active
/// frames and all bins. +inf when the noise energy is zero.
std::array<double, 2> snr_db(const SpectralTensor& z_x, const SpectralTensor& z_v, const VadLabels& vad);

/// Frequency bands with importance weights summing to one.
struct BandTable {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> weight;
};

/// One-third-octave band-importance table of the speech intelligibility
/// index, clipped to Nyquist and renormalized.
BandTable sii_third_octave_bands(double sample_rate);

/// Intelligibility-weighted SNR gain per ear: sum_b I_b (SNR_out,b - SNR_in,b).
/// Bands with no speech or no noise energy on either side are dropped and the
/// remaining weights renormalized.
std::array<double, 2> delta_isnr(const ShadowOutput& before, const ShadowOutput& after,
                                 const VadLabels& vad, const BandTable& bands);

/// Mean over valid bins of |wrap(ipd_out - ipd_in)| / pi. NaN when no bin is
/// valid in both.
double delta_itd(const CueEstimate& in, const CueEstimate& out);

/// Mean over valid bins of (|ic_out|^2 - |ic_in|^2)^2. NaN when no bin is
/// valid in both.
double delta_msc(const CueEstimate& in, const CueEstimate& out);

/// Cues of a two-channel (left, right) tensor over the selected frames.
CueEstimate pair_cues(const SpectralTensor& pair, const VadLabels* frames, bool active_frames = true,
                      double cutoff_hz = kCueCutoffHz);

struct MetricsReport {
  double snr_l = 0.0;
  double snr_r = 0.0;
  double disnr_l = 0.0;
  double disnr_r = 0.0;
  double ditd_s = 0.0;
  double ditd_n = 0.0;
  double dmsc_s = 0.0;
  double dmsc_n = 0.0;
  std::vector<double> ic_magnitude_spectrum;  // |IC| of the output noise per bin

  double snr(Ear e) const { return e == Ear::kLeft ? snr_l : snr_r; }
};

/// Everything needed to score a filter bank against a synthesized scene.
struct EvaluationScene {
  const SpectralTensor& x;
  const SpectralTensor& v;
  const VadLabels& vad;
  Selector q;
  BandTable bands;
  double cue_cutoff = kCueCutoffHz;

  EvaluationScene(const SpectralTensor& x_, const SpectralTensor& v_, const VadLabels& vad_, Selector q_,
                  double cutoff = kCueCutoffHz);
};

/// Noise cues are measured over all frames, speech cues over speech-active
/// frames.
MetricsReport evaluate(const FilterBank& filters, const EvaluationScene& scene);

/// Worst-ear output SNR only.
double worst_ear_snr(const FilterBank& filters, const EvaluationScene& scene, Ear worst);

struct IcSpectrum {
  std::vector<double> frequency;
  std::vector<bool> valid;
  std::vector<std::string> names;
  std::vector<std::vector<double>> magnitude;  // one column per variant
};

/// Lower and upper |IC| reference levels reported alongside the spectra.
inline constexpr double kIcLowReference = 0.2;
inline constexpr double kIcHighReference = 0.8;

IcSpectrum ic_spectrum(const std::vector<std::pair<std::string, CueEstimate>>& cues);
void write_ic_spectrum_csv(std::ostream& out, const IcSpectrum& spectrum);

/// Mean |IC| over valid bins.
double mean_valid_ic(const CueEstimate& cues);

std::string to_json(const MetricsReport& report);

}  // namespace binmwf
