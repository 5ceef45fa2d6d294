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

#include "binmwf/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "binmwf/error.hpp"
#include "binmwf/format.hpp"

namespace binmwf {
namespace {

// One-third-octave centers (Hz) and band importance for average speech.
constexpr std::array<double, 18> kSiiCenters = {160,  200,  250,  315,  400,  500,  630,  800,  1000,
                                                1250, 1600, 2000, 2500, 3150, 4000, 5000, 6300, 8000};
constexpr std::array<double, 18> kSiiImportance = {0.0083, 0.0095, 0.0150, 0.0289, 0.0440, 0.0578,
                                                   0.0653, 0.0711, 0.0818, 0.0844, 0.0882, 0.0898,
                                                   0.0868, 0.0844, 0.0771, 0.0527, 0.0364, 0.0185};

void check_pair(const SpectralTensor& t, const char* what) {
  if (t.channels() != 2) throw InvalidInput(std::string(what) + ": expected a two-channel tensor");
}

double band_energy(const SpectralTensor& t, std::size_t ch, const VadLabels& vad, double lo, double hi) {
  const StftConfig& cfg = t.config();
  double e = 0.0;
  for (std::size_t f = 0; f < t.frames(); ++f) {
    if (!vad.active[f]) continue;
    auto spec = t.frame(ch, f);
    for (std::size_t k = 0; k < t.bins(); ++k) {
      const double fk = cfg.bin_frequency(k);
      if (fk >= lo && fk < hi) e += std::norm(spec[k]);
    }
  }
  return e;
}

template <typename Fn>
double mean_over_valid(const CueEstimate& in, const CueEstimate& out, Fn term) {
  if (in.bins() != out.bins()) throw InvalidInput("cue metrics: bin count mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < in.bins(); ++k) {
    if (!in.valid[k] || !out.valid[k]) continue;
    sum += term(k);
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

}  // namespace

SpectralTensor apply_filters(const FilterBank& filters, const SpectralTensor& y) {
  if (filters.size() != y.bins()) throw InvalidInput("apply_filters: filter bank has wrong bin count");
  const auto m = static_cast<Eigen::Index>(y.channels());
  for (const auto& w : filters) {
    if (w.left.size() != m || w.right.size() != m) throw InvalidInput("apply_filters: filter dimension mismatch");
  }
  SpectralTensor z(2, y.frames(), y.config());
  for (std::size_t f = 0; f < y.frames(); ++f) {
    for (std::size_t k = 0; k < y.bins(); ++k) {
      const Eigen::VectorXcd s = y.snapshot(f, k);
      z.at(0, f, k) = filters[k].left.dot(s);
      z.at(1, f, k) = filters[k].right.dot(s);
    }
  }
  return z;
}

ShadowOutput shadow_filter(const FilterBank& filters, const SpectralTensor& x, const SpectralTensor& v) {
  if (x.channels() != v.channels() || x.frames() != v.frames() || x.bins() != v.bins()) {
    throw InvalidInput("shadow_filter: speech and noise tensors differ in shape");
  }
  return {apply_filters(filters, x), apply_filters(filters, v)};
}

SpectralTensor reference_pair(const SpectralTensor& t, const Selector& q) {
  SpectralTensor out(2, t.frames(), t.config());
  for (std::size_t f = 0; f < t.frames(); ++f) {
    auto l = t.frame(static_cast<std::size_t>(q.left_index), f);
    auto r = t.frame(static_cast<std::size_t>(q.right_index), f);
    std::copy(l.begin(), l.end(), out.frame(0, f).begin());
    std::copy(r.begin(), r.end(), out.frame(1, f).begin());
  }
  return out;
}

std::array<double, 2> snr_db(const SpectralTensor& z_x, const SpectralTensor& z_v, const VadLabels& vad) {
  check_pair(z_x, "snr");
  check_pair(z_v, "snr");
  if (vad.active.size() != z_x.frames() || z_v.frames() != z_x.frames()) {
    throw InvalidInput("snr: frame count mismatch");
  }
  std::array<double, 2> out{};
  for (std::size_t e = 0; e < 2; ++e) {
    double sx = 0.0;
    double sv = 0.0;
    for (std::size_t f = 0; f < z_x.frames(); ++f) {
      if (!vad.active[f]) continue;
      for (const auto& c : z_x.frame(e, f)) sx += std::norm(c);
      for (const auto& c : z_v.frame(e, f)) sv += std::norm(c);
    }
    out[e] = sv > 0.0 ? 10.0 * std::log10(sx / sv) : std::numeric_limits<double>::infinity();
  }
  return out;
}

BandTable sii_third_octave_bands(double sample_rate) {
  const double nyquist = sample_rate / 2.0;
  BandTable t;
  double total = 0.0;
  for (std::size_t b = 0; b < kSiiCenters.size(); ++b) {
    const double lo = kSiiCenters[b] * std::pow(2.0, -1.0 / 6.0);
    const double hi = kSiiCenters[b] * std::pow(2.0, 1.0 / 6.0);
    if (lo >= nyquist) break;
    t.lower.push_back(lo);
    // The last band is closed at Nyquist so the Nyquist bin is counted.
    t.upper.push_back(hi >= nyquist ? std::nextafter(nyquist, 2.0 * nyquist) : hi);
    t.weight.push_back(kSiiImportance[b]);
    total += kSiiImportance[b];
  }
  for (auto& w : t.weight) w /= total;
  return t;
}

std::array<double, 2> delta_isnr(const ShadowOutput& before, const ShadowOutput& after, const VadLabels& vad,
                                 const BandTable& bands) {
  for (const auto* t : {&before.x, &before.v, &after.x, &after.v}) check_pair(*t, "delta_isnr");
  std::array<double, 2> out{};
  for (std::size_t e = 0; e < 2; ++e) {
    double acc = 0.0;
    double weight = 0.0;
    for (std::size_t b = 0; b < bands.weight.size(); ++b) {
      const double lo = bands.lower[b];
      const double hi = bands.upper[b];
      const double xi = band_energy(before.x, e, vad, lo, hi);
      const double vi = band_energy(before.v, e, vad, lo, hi);
      const double xo = band_energy(after.x, e, vad, lo, hi);
      const double vo = band_energy(after.v, e, vad, lo, hi);
      if (!(xi > 0.0 && vi > 0.0 && xo > 0.0 && vo > 0.0)) continue;
      acc += bands.weight[b] * 10.0 * (std::log10(xo / vo) - std::log10(xi / vi));
      weight += bands.weight[b];
    }
    out[e] = weight > 0.0 ? acc / weight : 0.0;
  }
  return out;
}

double delta_itd(const CueEstimate& in, const CueEstimate& out) {
  return mean_over_valid(in, out, [&](std::size_t k) {
    return std::abs(wrap_angle(out.ipd[k] - in.ipd[k])) / std::numbers::pi;
  });
}

double delta_msc(const CueEstimate& in, const CueEstimate& out) {
  return mean_over_valid(in, out, [&](std::size_t k) {
    const double d = std::norm(out.ic[k]) - std::norm(in.ic[k]);
    return d * d;
  });
}

CueEstimate pair_cues(const SpectralTensor& pair, const VadLabels* frames, bool active_frames, double cutoff_hz) {
  check_pair(pair, "pair_cues");
  return input_cues(sample_coherence(pair, frames, active_frames), Selector::make(2, 0, 1), pair.config(),
                    cutoff_hz);
}

EvaluationScene::EvaluationScene(const SpectralTensor& x_, const SpectralTensor& v_, const VadLabels& vad_,
                                 Selector q_, double cutoff)
    : x(x_), v(v_), vad(vad_), q(std::move(q_)), bands(sii_third_octave_bands(x_.config().sample_rate)),
      cue_cutoff(cutoff) {}

MetricsReport evaluate(const FilterBank& filters, const EvaluationScene& scene) {
  const ShadowOutput before{reference_pair(scene.x, scene.q), reference_pair(scene.v, scene.q)};
  const ShadowOutput after = shadow_filter(filters, scene.x, scene.v);

  MetricsReport r;
  const auto snr = snr_db(after.x, after.v, scene.vad);
  r.snr_l = snr[0];
  r.snr_r = snr[1];
  const auto gain = delta_isnr(before, after, scene.vad, scene.bands);
  r.disnr_l = gain[0];
  r.disnr_r = gain[1];

  const auto noise_in = pair_cues(before.v, nullptr, true, scene.cue_cutoff);
  const auto noise_out = pair_cues(after.v, nullptr, true, scene.cue_cutoff);
  const auto speech_in = pair_cues(before.x, &scene.vad, true, scene.cue_cutoff);
  const auto speech_out = pair_cues(after.x, &scene.vad, true, scene.cue_cutoff);
  r.ditd_n = delta_itd(noise_in, noise_out);
  r.dmsc_n = delta_msc(noise_in, noise_out);
  r.ditd_s = delta_itd(speech_in, speech_out);
  r.dmsc_s = delta_msc(speech_in, speech_out);

  r.ic_magnitude_spectrum.resize(noise_out.bins());
  for (std::size_t k = 0; k < noise_out.bins(); ++k) r.ic_magnitude_spectrum[k] = std::abs(noise_out.ic[k]);
  return r;
}

double worst_ear_snr(const FilterBank& filters, const EvaluationScene& scene, Ear worst) {
  const ShadowOutput after = shadow_filter(filters, scene.x, scene.v);
  return snr_db(after.x, after.v, scene.vad)[static_cast<std::size_t>(worst)];
}

IcSpectrum ic_spectrum(const std::vector<std::pair<std::string, CueEstimate>>& cues) {
  IcSpectrum s;
  if (cues.empty()) return s;
  const auto& first = cues.front().second;
  s.frequency = first.frequency;
  s.valid = first.valid;
  for (const auto& [name, c] : cues) {
    if (c.bins() != first.bins()) throw InvalidInput("ic_spectrum: bin count mismatch");
    s.names.push_back(name);
    std::vector<double> col(c.bins());
    for (std::size_t k = 0; k < c.bins(); ++k) {
      col[k] = std::abs(c.ic[k]);
      s.valid[k] = s.valid[k] && c.valid[k];
    }
    s.magnitude.push_back(std::move(col));
  }
  return s;
}

void write_ic_spectrum_csv(std::ostream& out, const IcSpectrum& spectrum) {
  out << "bin,frequency_hz,valid";
  for (const auto& n : spectrum.names) out << ",ic_abs_" << n;
  out << ",ref_low,ref_high\n";
  for (std::size_t k = 0; k < spectrum.frequency.size(); ++k) {
    out << k << ',' << format_double(spectrum.frequency[k]) << ',' << (spectrum.valid[k] ? 1 : 0);
    for (const auto& col : spectrum.magnitude) out << ',' << format_double(col[k]);
    out << ',' << format_double(kIcLowReference) << ',' << format_double(kIcHighReference) << '\n';
  }
}

double mean_valid_ic(const CueEstimate& cues) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < cues.bins(); ++k) {
    if (!cues.valid[k]) continue;
    sum += std::abs(cues.ic[k]);
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

std::string to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["snr_l"] = report.snr_l;
  j["snr_r"] = report.snr_r;
  j["disnr_l"] = report.disnr_l;
  j["disnr_r"] = report.disnr_r;
  j["ditd_s"] = report.ditd_s;
  j["ditd_n"] = report.ditd_n;
  j["dmsc_s"] = report.dmsc_s;
  j["dmsc_n"] = report.dmsc_n;
  j["ic_magnitude_spectrum"] = report.ic_magnitude_spectrum;
  return j.dump(2);
}

}  // namespace binmwf
