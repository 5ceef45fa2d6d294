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

#include "binmwf/spatial_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "binmwf/error.hpp"
#include "binmwf/format.hpp"

namespace binmwf {
namespace {

constexpr double kGuard = 1e-12;

void resize(CueEstimate& c, std::size_t bins) {
  c.frequency.assign(bins, 0.0);
  c.ipd.assign(bins, 0.0);
  c.itd.assign(bins, std::numeric_limits<double>::quiet_NaN());
  c.ic.assign(bins, Complex{});
  c.valid.assign(bins, false);
  c.phase_defined.assign(bins, false);
}

// Fills bin k from the cross term and the two auto terms.
void set_bin(CueEstimate& c, std::size_t k, double f, Complex cross, double p_left, double p_right,
             double eps, double cutoff_hz) {
  c.frequency[k] = f;
  if (!(p_left > eps) || !(p_right > eps)) return;
  c.ic[k] = cross / std::sqrt(p_left * p_right);
  c.ipd[k] = wrap_angle(std::arg(cross));
  c.valid[k] = f > 0.0 && f <= cutoff_hz;
  c.phase_defined[k] = c.valid[k] && std::abs(cross) > eps;
  if (c.valid[k]) c.itd[k] = c.ipd[k] / (2.0 * std::numbers::pi * f);
}

}  // namespace

std::size_t CueEstimate::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

Selector Selector::make(Eigen::Index channels, Eigen::Index left_index, Eigen::Index right_index) {
  if (left_index < 0 || left_index >= channels || right_index < 0 || right_index >= channels) {
    throw InvalidInput("Selector: reference index out of range");
  }
  Selector s;
  s.left = Eigen::VectorXd::Zero(channels);
  s.right = Eigen::VectorXd::Zero(channels);
  s.left(left_index) = 1.0;
  s.right(right_index) = 1.0;
  s.left_index = left_index;
  s.right_index = right_index;
  return s;
}

Selector Selector::from_geometry(const ArrayGeometry& geometry) {
  return make(static_cast<Eigen::Index>(geometry.channel_count()),
              static_cast<Eigen::Index>(geometry.reference_index(Ear::kLeft)),
              static_cast<Eigen::Index>(geometry.reference_index(Ear::kRight)));
}

FilterPair Selector::as_filters() const {
  return {left.cast<Complex>(), right.cast<Complex>()};
}

double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

Eigen::MatrixXcd psd_floor(const Eigen::MatrixXcd& a) {
  const Eigen::MatrixXcd herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXcd out = eig.eigenvectors() * lambda.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

std::vector<Eigen::MatrixXcd> sample_coherence(const SpectralTensor& spec, const VadLabels* frames,
                                               bool active_frames) {
  const auto m = static_cast<Eigen::Index>(spec.channels());
  std::vector<Eigen::MatrixXcd> out(spec.bins(), Eigen::MatrixXcd::Zero(m, m));
  std::size_t used = 0;
  for (std::size_t f = 0; f < spec.frames(); ++f) {
    if (frames != nullptr && frames->active[f] != active_frames) continue;
    ++used;
    for (std::size_t k = 0; k < spec.bins(); ++k) {
      const Eigen::VectorXcd s = spec.snapshot(f, k);
      out[k].noalias() += s * s.adjoint();
    }
  }
  if (used > 0) {
    for (auto& phi : out) {
      phi /= static_cast<double>(used);
      phi = 0.5 * (phi + phi.adjoint()).eval();
    }
  }
  return out;
}

CoherenceSet estimate_coherence(const SpectralTensor& spec, const VadLabels& vad) {
  if (spec.empty()) throw InvalidInput("estimate_coherence: empty tensor");
  if (vad.active.size() != spec.frames()) {
    throw InvalidInput("estimate_coherence: VAD length does not match frame count");
  }
  CoherenceSet set;
  set.speech_frames = vad.active_count();
  set.noise_frames = vad.inactive_count();
  if (set.speech_frames < 2 || set.noise_frames < 2) {
    throw InvalidInput("estimate_coherence: need >= 2 speech-active and >= 2 noise-only frames (got " +
                       std::to_string(set.speech_frames) + " and " + std::to_string(set.noise_frames) + ")");
  }
  set.phi_yy = sample_coherence(spec, &vad, true);
  set.phi_vv = sample_coherence(spec, &vad, false);
  set.phi_xx.reserve(spec.bins());
  for (std::size_t k = 0; k < spec.bins(); ++k) set.phi_xx.push_back(psd_floor(set.phi_yy[k] - set.phi_vv[k]));
  return set;
}

CueEstimate input_cues(const std::vector<Eigen::MatrixXcd>& phi_vv, const Selector& q,
                       const StftConfig& cfg, double cutoff_hz) {
  CueEstimate c;
  resize(c, phi_vv.size());
  for (std::size_t k = 0; k < phi_vv.size(); ++k) {
    const auto& phi = phi_vv[k];
    if (phi.rows() != q.left.size()) throw InvalidInput("input_cues: dimension mismatch");
    const double eps = kGuard * std::abs(phi.trace().real());
    set_bin(c, k, cfg.bin_frequency(k), phi(q.left_index, q.right_index),
            phi(q.left_index, q.left_index).real(), phi(q.right_index, q.right_index).real(), eps,
            cutoff_hz);
  }
  return c;
}

CueEstimate output_cues(const std::vector<Eigen::MatrixXcd>& phi_vv, const FilterBank& filters,
                        const StftConfig& cfg, double cutoff_hz) {
  if (filters.size() != phi_vv.size()) throw InvalidInput("output_cues: filter bank size mismatch");
  CueEstimate c;
  resize(c, phi_vv.size());
  for (std::size_t k = 0; k < phi_vv.size(); ++k) {
    const auto& phi = phi_vv[k];
    const auto& w = filters[k];
    if (w.left.size() != phi.rows() || w.right.size() != phi.rows()) {
      throw InvalidInput("output_cues: dimension mismatch");
    }
    if (!w.left.allFinite() || !w.right.allFinite()) throw InvalidInput("output_cues: non-finite filter");
    const double eps = kGuard * std::abs(phi.trace().real());
    const Complex cross = w.left.dot(phi * w.right);  // dot() conjugates the first argument
    set_bin(c, k, cfg.bin_frequency(k), cross, w.left.dot(phi * w.left).real(),
            w.right.dot(phi * w.right).real(), eps, cutoff_hz);
  }
  return c;
}

void write_cues_csv(std::ostream& out, const CueEstimate& cues) {
  out << "bin,frequency_hz,valid,ipd_rad,itd_s,ic_re,ic_im,ic_abs\n";
  for (std::size_t k = 0; k < cues.bins(); ++k) {
    out << k << ',' << format_double(cues.frequency[k]) << ',' << (cues.valid[k] ? 1 : 0) << ','
        << format_double(cues.ipd[k]) << ',' << format_double(cues.itd[k]) << ','
        << format_double(cues.ic[k].real()) << ',' << format_double(cues.ic[k].imag()) << ','
        << format_double(std::abs(cues.ic[k])) << '\n';
  }
}

void write_coherence_csv(std::ostream& out, const CoherenceSet& set, const StftConfig& cfg) {
  const Eigen::Index m = set.bins() == 0 ? 0 : set.phi_yy.front().rows();
  out << "bin,frequency_hz";
  for (const char* name : {"phi_yy", "phi_vv", "phi_xx"}) {
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        out << ',' << name << '_' << i << '_' << j << "_re," << name << '_' << i << '_' << j << "_im";
      }
    }
  }
  out << '\n';
  for (std::size_t k = 0; k < set.bins(); ++k) {
    out << k << ',' << format_double(cfg.bin_frequency(k));
    for (const auto* mats : {&set.phi_yy, &set.phi_vv, &set.phi_xx}) {
      const auto& phi = (*mats)[k];
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
          out << ',' << format_double(phi(i, j).real()) << ',' << format_double(phi(i, j).imag());
        }
      }
    }
    out << '\n';
  }
}

}  // namespace binmwf
