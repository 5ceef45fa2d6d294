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

#include "binmwf/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "binmwf/error.hpp"
#include "binmwf/rng.hpp"

namespace binmwf {
namespace {

constexpr double kPi = std::numbers::pi;

// Head-shadow model constants: minimum high-frequency gain factor and the
// incidence angle where it occurs.
constexpr double kShadowAlphaMin = 0.1;
constexpr double kShadowThetaMin = 150.0 * kPi / 180.0;

double deg2rad(double d) { return d * kPi / 180.0; }

double reference_power(const SpectralTensor& t, std::size_t channel, const VadLabels* vad) {
  double e = 0.0;
  for (std::size_t f = 0; f < t.frames(); ++f) {
    if (vad != nullptr && !vad->active[f]) continue;
    for (const auto& c : t.frame(channel, f)) e += std::norm(c);
  }
  return e;
}

SpectralTensor apply_steering(const SpectralTensor& mono, const SteeringVectorSet& steering,
                              std::size_t channels) {
  SpectralTensor out(channels, mono.frames(), mono.config());
  for (std::size_t m = 0; m < channels; ++m) {
    for (std::size_t f = 0; f < mono.frames(); ++f) {
      auto src = mono.frame(0, f);
      auto dst = out.frame(m, f);
      for (std::size_t k = 0; k < mono.bins(); ++k) {
        dst[k] = steering.h[k](static_cast<Eigen::Index>(m)) * src[k];
      }
    }
  }
  return out;
}

SpectralTensor render_through_irs(const std::vector<double>& source, const ImpulseResponses& irs,
                                  const StftConfig& cfg) {
  MultichannelAudio audio;
  audio.reserve(irs.channels.size());
  for (const auto& ir : irs.channels) audio.push_back(convolve(source, ir, source.size()));
  return analyze(audio, cfg);
}

}  // namespace

void ArrayGeometry::validate() const {
  if (mics_per_ear < 1) throw InvalidInput("geometry: mics_per_ear must be >= 1");
  if (!(intra_array_spacing > 0.0)) throw InvalidInput("geometry: intra_array_spacing must be > 0");
  if (!(head_radius > 0.0)) throw InvalidInput("geometry: head_radius must be > 0");
  if (!(sound_speed > 0.0)) throw InvalidInput("geometry: sound_speed must be > 0");
}

void SceneSpec::validate(const StftConfig& cfg) const {
  if (!(speech_distance > 0.0) || !(noise_distance > 0.0)) {
    throw InvalidInput("scene: source distances must be > 0");
  }
  if (std::abs(speech_azimuth) > 90.0 || std::abs(noise_azimuth) > 90.0) {
    throw InvalidInput("scene: azimuths must lie in [-90, 90] degrees");
  }
  if (!(noise_cutoff > 0.0) || noise_cutoff >= cfg.sample_rate / 2.0) {
    throw InvalidInput("scene: noise_cutoff must be in (0, Nyquist)");
  }
  if (std::isnan(target_snr_worst_ear) || target_snr_worst_ear == -std::numeric_limits<double>::infinity()) {
    throw InvalidInput("scene: target_snr_worst_ear must be a number or +inf");
  }
  if (std::isnan(sensor_noise_db) || sensor_noise_db == std::numeric_limits<double>::infinity()) {
    throw InvalidInput("scene: sensor_noise_db must be finite or -inf");
  }
  if (!(vad_threshold_db >= 0.0)) throw InvalidInput("scene: vad_threshold_db must be >= 0");
}

std::size_t VadLabels::active_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
}

double woodworth_itd(double azimuth_rad, const ArrayGeometry& geometry) {
  const double t = std::abs(azimuth_rad);
  return geometry.head_radius / geometry.sound_speed * (t + std::sin(t));
}

std::vector<double> arrival_delays(const ArrayGeometry& geometry, double azimuth_deg) {
  const double theta = deg2rad(azimuth_deg);
  const double a_over_c = geometry.head_radius / geometry.sound_speed;
  // Ipsilateral ear leads the head center by (a/c) sin|theta|; the
  // contralateral ear lags by (a/c)|theta| (path wraps around the sphere).
  const double lead = -a_over_c * std::sin(std::abs(theta));
  const double lag = a_over_c * std::abs(theta);
  const double tau_left = theta >= 0.0 ? lag : lead;
  const double tau_right = theta >= 0.0 ? lead : lag;

  std::vector<double> delays(geometry.channel_count());
  for (std::size_t i = 0; i < geometry.mics_per_ear; ++i) {
    // Microphone i sits i * spacing behind the device's front microphone.
    const double intra = static_cast<double>(i) * geometry.intra_array_spacing * std::cos(theta) /
                         geometry.sound_speed;
    delays[i] = tau_left + intra;
    delays[geometry.mics_per_ear + i] = tau_right + intra;
  }
  return delays;
}

double head_shadow_gain(double frequency, double incidence_rad, const ArrayGeometry& geometry) {
  const double alpha = (1.0 + kShadowAlphaMin / 2.0) +
                       (1.0 - kShadowAlphaMin / 2.0) * std::cos(incidence_rad / kShadowThetaMin * kPi);
  const double w0 = geometry.sound_speed / geometry.head_radius;
  const double x = 2.0 * kPi * frequency / (2.0 * w0);
  return std::hypot(1.0, alpha * x) / std::hypot(1.0, x);
}

SteeringVectorSet steering_vector(const ArrayGeometry& geometry, double azimuth_deg,
                                  double distance, const StftConfig& cfg) {
  geometry.validate();
  if (!(std::abs(azimuth_deg) <= 90.0)) {
    throw InvalidInput("steering_vector: azimuth " + std::to_string(azimuth_deg) +
                       " outside [-90, 90] degrees");
  }
  if (!(distance > 0.0)) throw InvalidInput("steering_vector: distance must be > 0");

  const double theta = deg2rad(azimuth_deg);
  const auto delays = arrival_delays(geometry, azimuth_deg);
  const double incidence[2] = {kPi / 2.0 + theta, kPi / 2.0 - theta};
  const auto channels = static_cast<Eigen::Index>(geometry.channel_count());

  SteeringVectorSet set;
  set.h.reserve(cfg.bin_count());
  for (std::size_t k = 0; k < cfg.bin_count(); ++k) {
    const double f = cfg.bin_frequency(k);
    const double gain[2] = {head_shadow_gain(f, incidence[0], geometry) / distance,
                            head_shadow_gain(f, incidence[1], geometry) / distance};
    Eigen::VectorXcd h(channels);
    for (Eigen::Index m = 0; m < channels; ++m) {
      const std::size_t ear = static_cast<std::size_t>(m) < geometry.mics_per_ear ? 0 : 1;
      h(m) = std::polar(gain[ear], -2.0 * kPi * f * delays[static_cast<std::size_t>(m)]);
    }
    set.h.push_back(std::move(h));
  }
  return set;
}

std::vector<double> design_lowpass(double cutoff_hz, double sample_rate, std::size_t taps) {
  if (taps % 2 == 0) ++taps;
  const double fc = cutoff_hz / sample_rate;
  const double mid = static_cast<double>(taps - 1) / 2.0;
  std::vector<double> h(taps);
  double sum = 0.0;
  for (std::size_t n = 0; n < taps; ++n) {
    const double t = static_cast<double>(n) - mid;
    const double sinc = t == 0.0 ? 2.0 * fc : std::sin(2.0 * kPi * fc * t) / (kPi * t);
    const double r = 2.0 * kPi * static_cast<double>(n) / static_cast<double>(taps - 1);
    const double blackman = 0.42 - 0.5 * std::cos(r) + 0.08 * std::cos(2.0 * r);
    h[n] = sinc * blackman;
    sum += h[n];
  }
  for (auto& c : h) c /= sum;
  return h;
}

std::vector<double> filter_same(const std::vector<double>& signal, const std::vector<double>& taps) {
  const auto n = static_cast<std::ptrdiff_t>(signal.size());
  const auto l = static_cast<std::ptrdiff_t>(taps.size());
  const std::ptrdiff_t delay = (l - 1) / 2;
  std::vector<double> out(signal.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const std::ptrdiff_t j_lo = std::max<std::ptrdiff_t>(0, i + delay - (n - 1));
    const std::ptrdiff_t j_hi = std::min<std::ptrdiff_t>(l - 1, i + delay);
    for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) acc += taps[static_cast<std::size_t>(j)] * signal[static_cast<std::size_t>(i + delay - j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::vector<double> convolve(const std::vector<double>& signal, const std::vector<double>& taps,
                             std::size_t length) {
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < signal.size() && i < length; ++i) {
    const double s = signal[i];
    if (s == 0.0) continue;
    const std::size_t jmax = std::min(taps.size(), length - i);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += s * taps[j];
  }
  return out;
}

std::vector<double> white_noise(std::size_t length, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(length);
  for (auto& s : out) s = normal(gen);
  return out;
}

VadLabels ideal_vad(const SpectralTensor& clean_speech, double threshold_db) {
  if (clean_speech.empty()) throw InvalidInput("ideal_vad: empty tensor");
  if (!(threshold_db >= 0.0)) throw InvalidInput("ideal_vad: threshold_db must be >= 0");
  std::vector<double> energy(clean_speech.frames(), 0.0);
  for (std::size_t m = 0; m < clean_speech.channels(); ++m) {
    for (std::size_t f = 0; f < clean_speech.frames(); ++f) {
      for (const auto& c : clean_speech.frame(m, f)) energy[f] += std::norm(c);
    }
  }
  const double peak = *std::max_element(energy.begin(), energy.end());
  if (!(peak > 0.0)) throw InvalidInput("ideal_vad: input is all zero");
  const double floor = peak * std::pow(10.0, -threshold_db / 10.0);
  VadLabels vad;
  vad.active.resize(energy.size());
  for (std::size_t f = 0; f < energy.size(); ++f) vad.active[f] = energy[f] > 0.0 && energy[f] >= floor;
  return vad;
}

ImpulseResponses ImpulseResponses::from_wav(const WavData& wav, const ArrayGeometry& geometry,
                                            double sample_rate) {
  if (wav.sample_rate != sample_rate) {
    throw InvalidInput("impulse responses: sample rate mismatch");
  }
  if (wav.channels.size() != geometry.channel_count()) {
    throw InvalidInput("impulse responses: expected " + std::to_string(geometry.channel_count()) +
                       " channels, got " + std::to_string(wav.channels.size()));
  }
  if (wav.frames() == 0) throw InvalidInput("impulse responses: empty");
  return ImpulseResponses{wav.channels};
}

SceneSignals synthesize_scene(const std::vector<double>& speech, const SceneSpec& spec,
                              const ArrayGeometry& geometry, const StftConfig& cfg,
                              const SceneSources& sources) {
  cfg.validate();
  geometry.validate();
  spec.validate(cfg);
  if (std::none_of(speech.begin(), speech.end(), [](double s) { return s != 0.0; })) {
    throw InvalidInput("synthesize_scene: speech signal is silent");
  }
  const std::size_t channels = geometry.channel_count();

  SceneSignals scene;
  scene.speech_steering = steering_vector(geometry, spec.speech_azimuth, spec.speech_distance, cfg);
  scene.noise_steering = steering_vector(geometry, spec.noise_azimuth, spec.noise_distance, cfg);

  scene.x = sources.speech_ir ? render_through_irs(speech, *sources.speech_ir, cfg)
                              : apply_steering(analyze({speech}, cfg), scene.speech_steering, channels);

  const auto lowpass = design_lowpass(spec.noise_cutoff, cfg.sample_rate);
  const auto noise = filter_same(white_noise(speech.size(), derive_seed(spec.seed, "scene/noise")), lowpass);
  scene.v = sources.noise_ir ? render_through_irs(noise, *sources.noise_ir, cfg)
                             : apply_steering(analyze({noise}, cfg), scene.noise_steering, channels);

  scene.vad = ideal_vad(scene.x, spec.vad_threshold_db);

  auto snr_of = [&](const SpectralTensor& v, Ear e) {
    const std::size_t ref = geometry.reference_index(e);
    return reference_power(scene.x, ref, &scene.vad) / reference_power(v, ref, &scene.vad);
  };
  scene.worst_ear = snr_of(scene.v, Ear::kLeft) <= snr_of(scene.v, Ear::kRight) ? Ear::kLeft : Ear::kRight;

  if (std::isfinite(spec.sensor_noise_db)) {
    MultichannelAudio sensor(channels);
    for (std::size_t m = 0; m < channels; ++m) {
      sensor[m] = white_noise(speech.size(), derive_seed(spec.seed, "scene/sensor/" + std::to_string(m)));
    }
    SpectralTensor sensor_spec = analyze(sensor, cfg);
    double sensor_power = 0.0;
    for (std::size_t m = 0; m < channels; ++m) sensor_power += reference_power(sensor_spec, m, nullptr);
    sensor_power /= static_cast<double>(channels);
    const double directional = reference_power(scene.v, geometry.reference_index(scene.worst_ear), nullptr);
    sensor_spec *= std::sqrt(std::pow(10.0, spec.sensor_noise_db / 10.0) * directional / sensor_power);
    scene.v += sensor_spec;
  }

  if (spec.target_snr_worst_ear == std::numeric_limits<double>::infinity()) {
    scene.noise_gain = 0.0;
  } else {
    const double current = snr_of(scene.v, scene.worst_ear);
    scene.noise_gain = std::sqrt(current / std::pow(10.0, spec.target_snr_worst_ear / 10.0));
  }
  scene.v *= scene.noise_gain;
  scene.y = scene.x + scene.v;

  for (Ear e : {Ear::kLeft, Ear::kRight}) {
    scene.input_snr_db[static_cast<std::size_t>(e)] = 10.0 * std::log10(snr_of(scene.v, e));
  }
  return scene;
}

std::vector<double> synthetic_speech(double duration_s, double sample_rate, std::uint64_t seed) {
  if (!(duration_s > 1.0) || !(sample_rate > 0.0)) {
    throw InvalidInput("synthetic_speech: need duration > 1 s and a positive sample rate");
  }
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u(gen); };

  const auto total = static_cast<std::size_t>(duration_s * sample_rate);
  std::vector<double> out(total, 0.0);
  const auto fricative_hp = design_lowpass(2500.0, sample_rate, 255);

  double t = 0.35;
  const double end = duration_s - 0.3;
  while (t < end) {
    const int syllables = 2 + static_cast<int>(u(gen) * 2.0);
    for (int s = 0; s < syllables && t < end; ++s) {
      const double len = std::min(uniform(0.12, 0.25), end - t);
      const auto start = static_cast<std::size_t>(t * sample_rate);
      const auto n = static_cast<std::size_t>(len * sample_rate);
      const double f0 = uniform(95.0, 135.0);
      const double glide = uniform(-0.15, 0.15);
      const double formants[3] = {uniform(350.0, 800.0), uniform(900.0, 2200.0), uniform(2300.0, 3000.0)};
      const double widths[3] = {90.0, 130.0, 200.0};
      const double weights[3] = {1.0, 0.6, 0.25};
      const double level = uniform(0.5, 1.0);

      std::vector<double> syl(n, 0.0);
      const int harmonics = static_cast<int>(4000.0 / (f0 * 0.85));
      std::vector<double> phase(static_cast<std::size_t>(harmonics) + 1);
      for (auto& p : phase) p = uniform(0.0, 2.0 * kPi);
      for (std::size_t i = 0; i < n; ++i) {
        const double r = static_cast<double>(i) / static_cast<double>(n);
        const double pitch = f0 * (1.0 + glide * r);
        double acc = 0.0;
        for (int h = 1; h <= harmonics; ++h) {
          const double fh = pitch * h;
          if (fh > 4000.0) break;
          double env = 0.01;
          for (int q = 0; q < 3; ++q) {
            const double d = (fh - formants[q]) / widths[q];
            env += weights[q] / (1.0 + d * d);
          }
          auto& p = phase[static_cast<std::size_t>(h)];
          p += 2.0 * kPi * fh / sample_rate;
          acc += env * std::sin(p) / std::sqrt(static_cast<double>(h));
        }
        const double shape = std::sin(kPi * r);
        syl[i] = level * shape * shape * acc;
      }
      if (u(gen) < 0.3) {
        auto hiss = white_noise(n, gen());
        const auto low = filter_same(hiss, fricative_hp);
        for (std::size_t i = 0; i < n; ++i) {
          const double r = static_cast<double>(i) / static_cast<double>(n);
          syl[i] += 0.15 * level * std::sin(kPi * r) * (hiss[i] - low[i]);
        }
      }
      for (std::size_t i = 0; i < n && start + i < total; ++i) out[start + i] += syl[i];
      t += len + uniform(0.03, 0.06);
    }
    t += uniform(0.2, 0.45);
  }

  double peak = 0.0;
  for (double s : out) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) {
    for (auto& s : out) s *= 0.5 / peak;
  }
  return out;
}

}  // namespace binmwf
