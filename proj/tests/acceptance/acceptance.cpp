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

// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// quantities underneath. Exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "binmwf/bfgs.hpp"
#include "binmwf/costs.hpp"
#include "binmwf/metrics.hpp"
#include "binmwf/phase_model.hpp"
#include "binmwf/rng.hpp"
#include "binmwf/scene.hpp"
#include "binmwf/solver.hpp"
#include "binmwf/spatial_stats.hpp"
#include "binmwf/stft.hpp"
#include "support/oracles.hpp"

using namespace binmwf;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20260101;
constexpr Eigen::Index kChannels = 6;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void note(const std::string& what) { details.push_back("      " + what); }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Selector& q6() {
  static const auto q = Selector::make(kChannels, 0, 3);
  return q;
}

// ---------------------------------------------------------------------------

Outcome stft_round_trip() {
  Outcome out;
  const StftConfig cfg;
  const auto length = static_cast<std::size_t>(3.0 * cfg.sample_rate);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    std::mt19937_64 gen(derive_seed(kSeed, "stft") + seed);
    std::normal_distribution<double> n(0.0, 1.0);
    MultichannelAudio audio(1 + seed % 6, std::vector<double>(length));
    for (auto& ch : audio)
      for (auto& s : ch) s = n(gen);
    const MultichannelAudio back = synthesize(analyze(audio, cfg));
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t c = 0; c < audio.size(); ++c) {
      const std::size_t end = std::min(back[c].size(), length) - cfg.window_len;
      for (std::size_t t = cfg.window_len; t < end; ++t) {
        err += (back[c][t] - audio[c][t]) * (back[c][t] - audio[c][t]);
        ref += audio[c][t] * audio[c][t];
      }
    }
    worst = std::max(worst, std::sqrt(err / ref));
  }
  out.require(worst < 1e-10, fmt("worst interior relative RMS error %.3g over 24 seeds (< 1e-10)", worst));
  return out;
}

// ---------------------------------------------------------------------------

double bin_probability(const RatioPhaseParams& p, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double t) { return phase_pdf(t, p); }, a, b, 15, 1e-13);
}

Outcome phase_distribution() {
  Outcome out;
  constexpr std::size_t kBins = 64;
  constexpr std::size_t kSamples = 1000000;
  const double width = 2.0 * std::numbers::pi / kBins;
  for (double mag : {0.0, 0.2, 0.5, 0.9}) {
    RatioPhaseParams p;
    p.rho = std::polar(mag, std::numbers::pi / 4.0);
    const auto theta = sample_ratio_phase(p, kSamples, derive_seed(kSeed, "phase") + static_cast<std::uint64_t>(mag * 10));
    std::vector<double> counts(kBins, 0.0);
    for (double t : theta) {
      const auto i = static_cast<std::size_t>((t + std::numbers::pi) / width);
      counts[std::min(i, kBins - 1)] += 1.0;
    }
    double worst_z = 0.0;
    for (std::size_t b = 0; b < kBins; ++b) {
      const double prob = bin_probability(p, -std::numbers::pi + b * width, -std::numbers::pi + (b + 1) * width);
      const double se = std::sqrt(kSamples * prob * (1.0 - prob));
      worst_z = std::max(worst_z, std::abs(counts[b] - kSamples * prob) / se);
    }
    const double total = bin_probability(p, -std::numbers::pi, std::numbers::pi / 4.0) +
                         bin_probability(p, std::numbers::pi / 4.0, std::numbers::pi);
    out.require(worst_z < 3.0, fmt("|rho| = %.1f: largest bin deviation %.2f standard errors (< 3)", mag, worst_z));
    out.require(std::abs(total - 1.0) < 1e-9, fmt("|rho| = %.1f: integral - 1 = %.2g (< 1e-9)", mag, total - 1.0));
  }
  RatioPhaseParams zero;
  double dev = 0.0;
  for (int i = 0; i < 360; ++i) {
    const double t = -std::numbers::pi + (i + 1) * 2.0 * std::numbers::pi / 360.0;
    dev = std::max(dev, std::abs(phase_pdf(t, zero) - 1.0 / (2.0 * std::numbers::pi)));
  }
  out.require(dev < 1e-15, fmt("rho = 0: largest deviation from 1/(2 pi) is %.2g", dev));
  return out;
}

// ---------------------------------------------------------------------------

Outcome rank_one_coherence() {
  Outcome out;
  const StftConfig cfg;
  SceneSpec spec;
  spec.noise_azimuth = 30.0;
  spec.sensor_noise_db = -std::numeric_limits<double>::infinity();
  spec.seed = derive_seed(kSeed, "rank-one");
  const double duration = (10000.0 * cfg.hop + cfg.window_len) / cfg.sample_rate + 0.1;
  const auto scene = synthesize_scene(synthetic_speech(duration, cfg.sample_rate, spec.seed), spec, ArrayGeometry{}, cfg);
  const auto cues = input_cues(sample_coherence(scene.v, nullptr), Selector::from_geometry(ArrayGeometry{}), cfg);
  double min_ic = 1.0;
  double worst_phase = 0.0;
  for (std::size_t k = 0; k < cues.bins(); ++k) {
    if (!cues.valid[k]) continue;
    min_ic = std::min(min_ic, std::abs(cues.ic[k]));
    worst_phase = std::max(worst_phase, std::abs(wrap_angle(std::arg(cues.ic[k]) - cues.ipd[k])));
  }
  out.note(fmt("%.0f frames, %.0f valid bins", static_cast<double>(scene.v.frames()),
               static_cast<double>(cues.valid_count())));
  out.require(scene.v.frames() >= 10000 && cues.valid_count() > 0, "at least 1e4 frames and one valid bin");
  out.require(min_ic >= 0.999, fmt("smallest |IC_in| = %.6f (>= 0.999)", min_ic));
  out.require(worst_phase < 1e-9, fmt("largest |arg IC_in - IPD_in| = %.2g (< 1e-9)", worst_phase));
  return out;
}

// ---------------------------------------------------------------------------

struct Instance {
  Eigen::MatrixXcd phi_yy;
  Eigen::MatrixXcd phi_xx;
  Eigen::MatrixXcd phi_vv;
  BinCoherence bin() const { return {phi_yy, phi_xx, phi_vv, 500.0}; }
};

Instance random_instance(std::mt19937_64& gen, bool rank_one_noise) {
  Instance s;
  s.phi_xx = oracle::random_psd(gen, kChannels);
  s.phi_vv = rank_one_noise ? Eigen::MatrixXcd(oracle::rank_one(oracle::random_vector(gen, kChannels), 2.0))
                            : oracle::random_psd(gen, kChannels);
  s.phi_yy = s.phi_xx + s.phi_vv;
  return s;
}

FilterPair random_filters(std::mt19937_64& gen) {
  return {oracle::random_vector(gen, kChannels), oracle::random_vector(gen, kChannels)};
}

// Componentwise relative error; components far below the largest one are
// measured against 1e-3 of it.
double gradient_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric) {
  const double floor = 1e-3 * numeric.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double denom = std::max(std::abs(numeric(i)), floor);
    if (denom > 0.0) worst = std::max(worst, std::abs(analytic(i) - numeric(i)) / denom);
  }
  return worst;
}

template <typename Cost>
Eigen::VectorXd fd_gradient(Cost cost, const FilterPair& w) {
  const Eigen::VectorXd x = pack(w);
  auto f = [&](const Eigen::VectorXd& p) { return cost(unpack(p, kChannels)).value; };
  const Eigen::VectorXd g1 = oracle::numeric_gradient(f, x, 2e-4);
  const Eigen::VectorXd g2 = oracle::numeric_gradient(f, x, 1e-4);
  return (4.0 * g2 - g1) / 3.0;
}

Outcome solver_equivalence() {
  Outcome out;
  std::mt19937_64 gen(derive_seed(kSeed, "solver"));
  double worst_coeff = 0.0;
  int converged = 0;
  constexpr int kInstances = 60;
  for (int trial = 0; trial < kInstances; ++trial) {
    const auto s = random_instance(gen, false);
    const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      auto e = j_w(unpack(x, kChannels), s.bin(), q6());
      g = std::move(e.gradient);
      return e.value;
    };
    std::normal_distribution<double> n(0.0, 1.0);
    const Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(4 * kChannels, [&] { return n(gen); });
    BfgsOptions opt;
    opt.gradient_tolerance = 1e-10;
    const auto r = minimize_bfgs(f, x0, opt);
    converged += r.converged() ? 1 : 0;
    const auto closed = mwf_closed_form(s.phi_yy, s.phi_xx, q6());
    const auto found = unpack(r.x, kChannels);
    const double scale = std::max(closed.left.cwiseAbs().maxCoeff(), closed.right.cwiseAbs().maxCoeff());
    worst_coeff = std::max(worst_coeff, std::max((closed.left - found.left).cwiseAbs().maxCoeff(),
                                                 (closed.right - found.right).cwiseAbs().maxCoeff()) /
                                            scale);
  }
  out.require(worst_coeff < 1e-6,
              fmt("BFGS vs closed form on %.0f random instances: worst relative coefficient error %.2g (< 1e-6)",
                  kInstances, worst_coeff));
  out.note(fmt("%.0f of %.0f runs met the gradient tolerance", converged, kInstances));

  std::map<std::string, double> worst;
  int checked = 0;
  for (int trial = 0; checked < 100; ++trial) {
    const auto s = random_instance(gen, trial % 3 == 0);
    const auto w = random_filters(gen);
    // Keep the wrapped phase error away from the branch cut.
    const double diff = wrap_angle(std::arg(w.left.dot(s.phi_vv * w.right)) - std::arg(s.phi_vv(0, 3)));
    if (std::abs(diff) > 3.0) continue;
    ++checked;
    CostSpec itd;
    itd.variant = Variant::kMwfItd;
    itd.alpha = 10.0;
    CostSpec ic = itd;
    ic.variant = Variant::kMwfIc;
    const std::vector<std::pair<std::string, std::function<CostEval(const FilterPair&)>>> costs = {
        {"J_W", [&](const FilterPair& f) { return j_w(f, s.bin(), q6()); }},
        {"J_IPD", [&](const FilterPair& f) { return j_ipd(f, s.phi_vv, q6()); }},
        {"J_IC", [&](const FilterPair& f) { return j_ic(f, s.phi_vv, q6()); }},
        {"J_W + a J_IPD", [&](const FilterPair& f) { return combined(f, s.bin(), q6(), itd); }},
        {"J_W + a J_IC", [&](const FilterPair& f) { return combined(f, s.bin(), q6(), ic); }},
    };
    for (const auto& [name, cost] : costs) {
      worst[name] = std::max(worst[name], gradient_error(cost(w).gradient, fd_gradient(cost, w)));
    }
  }
  for (const auto& [name, err] : worst) {
    out.require(err < 1e-5, name + fmt(": worst gradient relative error %.2g over %.0f points (< 1e-5)", err, checked));
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome ic_ipd_equivalence() {
  Outcome out;
  std::mt19937_64 gen(derive_seed(kSeed, "equivalence"));
  for (double delta : {0.01, 0.05, 0.1}) {
    double worst = 0.0;
    double min_ic = 1.0;
    for (int trial = 0; trial < 200; ++trial) {
      const auto s = random_instance(gen, true);
      FilterPair w = random_filters(gen);
      const double d = trial % 2 == 0 ? delta : -delta;
      const double ipd_in = std::arg(s.phi_vv(0, 3));
      w.right *= std::polar(1.0, ipd_in + d - std::arg(w.left.dot(s.phi_vv * w.right)));
      const Complex cross = w.left.dot(s.phi_vv * w.right);
      min_ic = std::min(min_ic, std::abs(cross) / std::sqrt(w.left.dot(s.phi_vv * w.left).real() *
                                                            w.right.dot(s.phi_vv * w.right).real()));
      const double jipd = j_ipd(w, s.phi_vv, q6()).value;
      const double jic = j_ic(w, s.phi_vv, q6()).value;
      worst = std::max(worst, std::abs(jic - jipd) / jipd);
    }
    out.require(min_ic > 1.0 - 1e-9 && worst < 0.05,
                fmt("delta = %.2f: |IC_out| >= %.12f, worst |J_IC - J_IPD| / J_IPD = %.3g (< 0.05)", delta,
                    min_ic, worst));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct VariantResult {
  double alpha = 0.0;
  CalibrationResult calibration;
  SolveResult solution;
  MetricsReport metrics;
  double mean_ic = 0.0;
};

struct SceneRun {
  double noise_azimuth = 0.0;
  SceneSignals scene;
  CoherenceSet phi;
  Selector q;
  std::unique_ptr<EvaluationScene> eval;
  double unprocessed_ic = 0.0;
  std::map<Variant, VariantResult> variants;
  double seconds = 0.0;

  std::string label() const { return "S0N" + std::to_string(static_cast<int>(noise_azimuth)); }
};

SceneRun& scene_run(double noise_azimuth) {
  static std::map<double, SceneRun> cache;
  auto it = cache.find(noise_azimuth);
  if (it != cache.end()) return it->second;

  const auto t0 = std::chrono::steady_clock::now();
  SceneRun& r = cache[noise_azimuth];
  r.noise_azimuth = noise_azimuth;
  const StftConfig cfg;
  SceneSpec spec;
  spec.noise_azimuth = noise_azimuth;
  spec.seed = derive_seed(kSeed, "scene");
  r.scene = synthesize_scene(synthetic_speech(6.0, cfg.sample_rate, derive_seed(kSeed, "speech")), spec,
                             ArrayGeometry{}, cfg);
  r.phi = estimate_coherence(r.scene.y, r.scene.vad);
  r.q = Selector::from_geometry(ArrayGeometry{});
  r.eval = std::make_unique<EvaluationScene>(r.scene.x, r.scene.v, r.scene.vad, r.q);
  r.unprocessed_ic = mean_valid_ic(pair_cues(reference_pair(r.scene.v, r.q), nullptr));

  const SolverConfig solver;
  CalibrationOptions options;
  options.loss_fraction = 0.15;
  for (Variant v : {Variant::kMwf, Variant::kMwfItd, Variant::kMwfIc}) {
    VariantResult res;
    CostSpec cs;
    cs.variant = v;
    if (v != Variant::kMwf) {
      res.calibration = calibrate_alpha(cs, r.phi, *r.eval, r.scene.worst_ear, cfg, solver, options);
      res.alpha = res.calibration.alpha;
    }
    cs.alpha = res.alpha;
    res.solution = solve(cs, r.phi, r.q, cfg, solver);
    res.metrics = evaluate(res.solution.filters, *r.eval);
    res.mean_ic = mean_valid_ic(pair_cues(shadow_filter(res.solution.filters, r.scene.x, r.scene.v).v, nullptr));
    r.variants[v] = std::move(res);
  }
  r.seconds = seconds_since(t0);
  return r;
}

const std::vector<double>& scene_azimuths() {
  static const std::vector<double> az{30.0, 60.0};
  return az;
}

Outcome trade_off() {
  Outcome out;
  for (double az : scene_azimuths()) {
    const SceneRun& r = scene_run(az);
    const auto& mwf = r.variants.at(Variant::kMwf).metrics;
    const auto& itd = r.variants.at(Variant::kMwfItd);
    const auto& ic = r.variants.at(Variant::kMwfIc);
    out.note(r.label() + ": worst ear " + ear_name(r.scene.worst_ear) +
             fmt(", input SNR L/R %.2f / %.2f dB", r.scene.input_snr_db[0], r.scene.input_snr_db[1]));
    for (const auto* v : {&itd, &ic}) {
      const char* name = v == &itd ? "MWF-ITD" : "MWF-IC";
      const auto& c = v->calibration;
      out.require(c.achieved_loss >= 0.13 && c.achieved_loss <= 0.15,
                  r.label() + " (a) " + name +
                      fmt(": alpha %.4g, SNR loss %.2f%% (in [13%%, 15%%])", c.alpha, 100.0 * c.achieved_loss) +
                      (c.at_boundary ? " [search boundary reached]" : ""));
    }
    out.require(mwf.ditd_n >= 10.0 * ic.metrics.ditd_n,
                r.label() + fmt(" (b) dITD_N: MWF %.4g, MWF-IC %.4g, ratio %.1f (>= 10)", mwf.ditd_n,
                                ic.metrics.ditd_n, mwf.ditd_n / ic.metrics.ditd_n));
    out.require(ic.metrics.dmsc_n < mwf.dmsc_n && mwf.dmsc_n < itd.metrics.dmsc_n,
                r.label() + fmt(" (c) dMSC_N: MWF-IC %.3g < MWF %.3g < MWF-ITD %.3g", ic.metrics.dmsc_n,
                                mwf.dmsc_n, itd.metrics.dmsc_n));
    for (Variant v : {Variant::kMwf, Variant::kMwfItd, Variant::kMwfIc}) {
      const auto& m = r.variants.at(v).metrics;
      out.require(m.ditd_s < 0.05 && m.dmsc_s < 0.1,
                  r.label() + " (d) " + std::string(variant_name(v)) +
                      fmt(": dITD_S %.3g (< 0.05), dMSC_S %.3g (< 0.1)", m.ditd_s, m.dmsc_s));
    }
    out.require(r.seconds < 300.0, r.label() + fmt(": %.1f s (< 300 s)", r.seconds));
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome ic_spectra() {
  Outcome out;
  for (double az : scene_azimuths()) {
    const SceneRun& r = scene_run(az);
    const double mwf = r.variants.at(Variant::kMwf).mean_ic;
    const double itd = r.variants.at(Variant::kMwfItd).mean_ic;
    const double ic = r.variants.at(Variant::kMwfIc).mean_ic;
    out.require(ic >= 0.8, r.label() + fmt(": mean |IC_out| MWF-IC %.4f (>= 0.8)", ic));
    out.require(itd < mwf, r.label() + fmt(": mean |IC_out| MWF-ITD %.4f < MWF %.4f", itd, mwf));
    out.require(r.unprocessed_ic >= 0.999, r.label() + fmt(": unprocessed mean |IC| %.6f (1.0 within 1e-3)", r.unprocessed_ic));
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome monotone_trends() {
  Outcome out;
  const std::vector<double> alphas{0.1, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5};
  for (double az : scene_azimuths()) {
    const SceneRun& r = scene_run(az);
    const Ear worst = r.scene.worst_ear;
    for (Variant v : {Variant::kMwfItd, Variant::kMwfIc}) {
      CostSpec cs;
      cs.variant = v;
      const auto rows = alpha_sweep(cs, r.phi, *r.eval, alphas, StftConfig{}, SolverConfig{});
      double snr_rise = 0.0;
      double isnr_rise = 0.0;
      double itd_rise = 0.0;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1].metrics;
        const auto& b = rows[i].metrics;
        const auto isnr = [&](const MetricsReport& m) { return worst == Ear::kLeft ? m.disnr_l : m.disnr_r; };
        snr_rise = std::max(snr_rise, b.snr(worst) - a.snr(worst));
        isnr_rise = std::max(isnr_rise, isnr(b) - isnr(a));
        itd_rise = std::max(itd_rise, b.ditd_n - a.ditd_n);
      }
      const std::string name(variant_name(v));
      out.require(snr_rise <= 0.5 && isnr_rise <= 0.5,
                  r.label() + " " + name +
                      fmt(": largest step increase of worst-ear SNR %.3f dB, dISNR %.3f dB (<= 0.5)", snr_rise,
                          isnr_rise));
      out.require(itd_rise <= 0.02, r.label() + " " + name + fmt(": largest step increase of dITD_N %.4f (<= 0.02)", itd_rise));
      out.note(r.label() + " " + name +
               fmt(": SNR %.2f -> %.2f dB over alpha 0.1 .. 1e5, dITD_N %.3g", rows.front().metrics.snr(worst),
                   rows.back().metrics.snr(worst), rows.back().metrics.ditd_n) +
               fmt(" (from %.3g)", rows.front().metrics.ditd_n));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> artifacts(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[entry.path().filename().string()] = s.str();
  }
  return files;
}

Outcome determinism() {
  Outcome out;
  const auto cfg = app::parse_config(
      "seed = 314\n"
      "input.duration = 3\n"
      "scene.noise_azimuth = 30\n"
      "run.variants = MWF, MWF-ITD, MWF-IC\n"
      "run.alpha = 100\n");
  const fs::path root = fs::temp_directory_path() / ("binmwf_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::ostringstream log;
  const int a = app::run_process(cfg, root / "a", log);
  const int b = app::run_process(cfg, root / "b", log);
  const auto fa = artifacts(root / "a");
  const auto fb = artifacts(root / "b");
  fs::remove_all(root);
  out.require(a == app::kExitOk && b == app::kExitOk, fmt("both runs exit with %.0f and %.0f", a, b));
  std::size_t checked = 0;
  bool same = fa.size() == fb.size();
  for (const auto& [name, bytes] : fa) {
    const bool text = name.ends_with(".json") || name.ends_with(".csv");
    if (!text) continue;
    ++checked;
    const auto it = fb.find(name);
    same = same && it != fb.end() && it->second == bytes;
  }
  out.require(same && checked >= 4,
              fmt("%.0f JSON/CSV artifacts byte-identical across runs (%.0f files in total)", checked, fa.size()));
  return out;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
  double budget_seconds;  // 0 when the criterion sets no runtime limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "STFT round trip", stft_round_trip, 5.0},
      {2, "phase-ratio distribution", phase_distribution, 30.0},
      {3, "rank-one coherence identity", rank_one_coherence, 0.0},
      {4, "solver equivalence and gradients", solver_equivalence, 0.0},
      {5, "IC / IPD first-order equivalence", ic_ipd_equivalence, 0.0},
      {6, "trade-off at the calibrated weighting factor", trade_off, 0.0},
      {7, "output coherence spectra", ic_spectra, 0.0},
      {8, "monotone trends over a weighting-factor sweep", monotone_trends, 0.0},
      {9, "end-to-end determinism", determinism, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(t0);
    if (c.budget_seconds > 0.0) {
      o.require(elapsed < c.budget_seconds, fmt("runtime %.2f s (< %.0f s)", elapsed, c.budget_seconds));
    }
    std::printf("%s  criterion %d: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, elapsed);
    for (const auto& d : o.details) std::printf("        %s\n", d.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
