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

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "binmwf/filter_pair.hpp"
#include "binmwf/scene.hpp"
#include "binmwf/stft.hpp"

namespace binmwf {

/// Frequency up to which interaural phase is unambiguous for a human head;
/// the phase unwrapping factor is taken as zero below it.
inline constexpr double kCueCutoffHz = 1500.0;

/// Per-bin spatial coherence matrices. phi_xx is the PSD-floored difference
/// phi_yy - phi_vv.
struct CoherenceSet {
  std::vector<Eigen::MatrixXcd> phi_yy;
  std::vector<Eigen::MatrixXcd> phi_vv;
  std::vector<Eigen::MatrixXcd> phi_xx;
  std::size_t speech_frames = 0;
  std::size_t noise_frames = 0;

  std::size_t bins() const { return phi_yy.size(); }
};

/// Reference-microphone selectors q_L and q_R.
struct Selector {
  Eigen::VectorXd left;
  Eigen::VectorXd right;
  Eigen::Index left_index = 0;
  Eigen::Index right_index = 0;

  static Selector make(Eigen::Index channels, Eigen::Index left_index, Eigen::Index right_index);
  static Selector from_geometry(const ArrayGeometry& geometry);
  FilterPair as_filters() const;
};

/// Interaural cues per bin. `valid` marks bins inside (0, cutoff] with
/// usable reference power; `phase_defined` additionally requires a nonzero
/// cross term.
struct CueEstimate {
  std::vector<double> frequency;
  std::vector<double> ipd;  // radians in (-pi, pi]
  std::vector<double> itd;  // seconds, NaN outside valid bins
  std::vector<Complex> ic;
  std::vector<bool> valid;
  std::vector<bool> phase_defined;

  std::size_t bins() const { return ipd.size(); }
  std::size_t valid_count() const;
};

/// Clamps negative eigenvalues of a Hermitian matrix to zero.
Eigen::MatrixXcd psd_floor(const Eigen::MatrixXcd& a);

/// Averages y y^H over speech-active frames (phi_yy) and over noise-only
/// frames (phi_vv).
CoherenceSet estimate_coherence(const SpectralTensor& spec, const VadLabels& vad);

/// Sample covariance of a tensor over the selected frames (all if `frames`
/// is null), one matrix per bin.
std::vector<Eigen::MatrixXcd> sample_coherence(const SpectralTensor& spec, const VadLabels* frames,
                                               bool active_frames = true);

CueEstimate input_cues(const std::vector<Eigen::MatrixXcd>& phi_vv, const Selector& q,
                       const StftConfig& cfg, double cutoff_hz = kCueCutoffHz);

/// Output cues use the Hermitian numerator w_L^H phi w_R for both IPD and IC.
CueEstimate output_cues(const std::vector<Eigen::MatrixXcd>& phi_vv, const FilterBank& filters,
                        const StftConfig& cfg, double cutoff_hz = kCueCutoffHz);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

void write_cues_csv(std::ostream& out, const CueEstimate& cues);
void write_coherence_csv(std::ostream& out, const CoherenceSet& set, const StftConfig& cfg);

}  // namespace binmwf
