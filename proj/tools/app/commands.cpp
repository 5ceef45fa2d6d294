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

#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "binmwf/error.hpp"
#include "binmwf/format.hpp"
#include "binmwf/metrics.hpp"
#include "binmwf/phase_model.hpp"
#include "binmwf/rng.hpp"
#include "binmwf/wav.hpp"

namespace binmwf::app {
namespace {

using Json = nlohmann::ordered_json;

struct Prepared {
  SceneSignals scene;
  CoherenceSet phi;
  Selector q;
};

Prepared prepare(const RunConfig& cfg) {
  std::vector<double> speech;
  if (cfg.speech) {
    WavData wav;
    try {
      wav = read_wav(*cfg.speech, cfg.stft.sample_rate);
    } catch (const InvalidInput& e) {
      throw ConfigError("input.speech", e.what());
    }
    if (wav.channels.size() != 1) {
      throw ConfigError("input.speech", "expected a mono WAV, got " + std::to_string(wav.channels.size()) +
                                            " channels");
    }
    speech = std::move(wav.channels.front());
  } else {
    speech = synthetic_speech(cfg.duration, cfg.stft.sample_rate, derive_seed(cfg.seed, "input/speech"));
  }

  SceneSources sources;
  const auto load_ir = [&](const std::string& key, const std::optional<std::filesystem::path>& path,
                           std::optional<ImpulseResponses>& slot) {
    if (!path) return;
    try {
      slot = ImpulseResponses::from_wav(read_wav(*path, cfg.stft.sample_rate), cfg.geometry, cfg.stft.sample_rate);
    } catch (const InvalidInput& e) {
      throw ConfigError(key, e.what());
    }
  };
  load_ir("input.speech_ir", cfg.speech_ir, sources.speech_ir);
  load_ir("input.noise_ir", cfg.noise_ir, sources.noise_ir);

  SceneSpec spec = cfg.scene;
  spec.seed = cfg.seed;
  Prepared p{};
  try {
    p.scene = synthesize_scene(speech, spec, cfg.geometry, cfg.stft, sources);
    p.phi = estimate_coherence(p.scene.y, p.scene.vad);
  } catch (const InvalidInput& e) {
    throw ConfigError(cfg.speech ? "input.speech" : "input.duration", e.what());
  }
  p.q = Selector::from_geometry(cfg.geometry);
  return p;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw IoError("write failed: '" + path.string() + "'");
}

void make_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

CostSpec cost_spec(const RunConfig& cfg, Variant v, double alpha) {
  CostSpec s;
  s.variant = v;
  s.alpha = alpha;
  s.cue_cutoff = cfg.cue_cutoff;
  return s;
}

bool penalized(Variant v) { return v != Variant::kMwf; }

Json calibration_json(const CalibrationResult& c) {
  Json j;
  j["alpha"] = c.alpha;
  j["mwf_snr_db"] = c.mwf_snr_db;
  j["snr_db"] = c.snr_db;
  j["achieved_loss"] = c.achieved_loss;
  j["at_boundary"] = c.at_boundary;
  if (!c.warning.empty()) j["warning"] = c.warning;
  return j;
}

struct VariantRun {
  Variant variant = Variant::kMwf;
  double alpha = 0.0;
  std::optional<CalibrationResult> calibration;
  SolveResult solution;
  MetricsReport metrics;
};

void write_bins_csv(std::ostream& out, const VariantRun& run, const CueEstimate& in, const CueEstimate& result) {
  out << "bin,frequency_hz,cost,iterations,converged,flagged,valid,noise_ipd_in,noise_ipd_out,noise_ic_in_abs,"
         "noise_ic_out_abs\n";
  for (std::size_t k = 0; k < run.solution.filters.size(); ++k) {
    out << k << ',' << format_double(in.frequency[k]) << ',' << format_double(run.solution.cost[k]) << ','
        << run.solution.iterations[k] << ',' << (run.solution.converged[k] ? 1 : 0) << ','
        << (run.solution.flagged[k] ? 1 : 0) << ',' << (in.valid[k] && result.valid[k] ? 1 : 0) << ','
        << format_double(in.ipd[k]) << ',' << format_double(result.ipd[k]) << ','
        << format_double(std::abs(in.ic[k])) << ',' << format_double(std::abs(result.ic[k])) << '\n';
  }
}

void warn_unconverged(std::ostream& log, Variant v, double fraction) {
  log << "warning: " << variant_name(v) << ": " << format_double(100.0 * fraction)
      << "% of bins did not reach the gradient tolerance\n";
}

}  // namespace

std::string variant_slug(Variant v) {
  std::string s(variant_name(v));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

int run_process(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  validate(cfg);
  for (Variant v : cfg.variants) {
    if (penalized(v) && !cfg.alpha && !cfg.calibrate) {
      throw ConfigError("run.alpha", std::string("required by ") + std::string(variant_name(v)) +
                                         " unless run.calibrate is set");
    }
  }

  const Prepared p = prepare(cfg);
  const EvaluationScene scene(p.scene.x, p.scene.v, p.scene.vad, p.q, cfg.cue_cutoff);

  std::vector<VariantRun> runs;
  for (Variant v : cfg.variants) {
    VariantRun r;
    r.variant = v;
    if (penalized(v)) {
      if (cfg.calibrate) {
        CalibrationOptions opts;
        opts.loss_fraction = *cfg.calibrate;
        r.calibration = calibrate_alpha(cost_spec(cfg, v, 0.0), p.phi, scene, p.scene.worst_ear, cfg.stft,
                                        cfg.solver, opts);
        r.alpha = r.calibration->alpha;
        if (!r.calibration->warning.empty()) log << "warning: " << variant_name(v) << ": " << r.calibration->warning << '\n';
      } else {
        r.alpha = *cfg.alpha;
      }
    }
    r.solution = solve(cost_spec(cfg, v, r.alpha), p.phi, p.q, cfg.stft, cfg.solver);
    r.metrics = evaluate(r.solution.filters, scene);
    runs.push_back(std::move(r));
  }

  make_output_dir(out_dir);

  const SpectralTensor noise_ref = reference_pair(p.scene.v, p.q);
  const CueEstimate noise_in = pair_cues(noise_ref, nullptr, true, cfg.cue_cutoff);
  {
    auto out = open_output(out_dir / "input_cues.csv");
    write_cues_csv(out, noise_in);
  }

  const auto write_pair = [&](const std::string& stem, const SpectralTensor& pair) {
    const MultichannelAudio audio = synthesize(pair);
    for (std::size_t e = 0; e < 2; ++e) {
      WavData wav;
      wav.sample_rate = cfg.stft.sample_rate;
      wav.channels = {audio[e]};
      write_wav(out_dir / (stem + (e == 0 ? "_left.wav" : "_right.wav")), wav, SampleFormat::kFloat32);
    }
  };
  write_pair("unprocessed", reference_pair(p.scene.y, p.q));

  Json report;
  report["seed"] = cfg.seed;
  report["sample_rate"] = cfg.stft.sample_rate;
  report["worst_ear"] = ear_name(p.scene.worst_ear);
  report["input_snr_db"] = {{"left", p.scene.input_snr_db[0]}, {"right", p.scene.input_snr_db[1]}};
  report["noise_gain"] = p.scene.noise_gain;
  report["variants"] = Json::array();

  std::vector<std::pair<std::string, CueEstimate>> spectra{{"unprocessed", noise_in}};
  int code = kExitOk;
  for (const auto& r : runs) {
    const std::string slug = variant_slug(r.variant);
    write_pair(slug, apply_filters(r.solution.filters, p.scene.y));

    const ShadowOutput shadow = shadow_filter(r.solution.filters, p.scene.x, p.scene.v);
    const CueEstimate noise_out = pair_cues(shadow.v, nullptr, true, cfg.cue_cutoff);
    {
      auto out = open_output(out_dir / (slug + "_bins.csv"));
      write_bins_csv(out, r, noise_in, noise_out);
    }
    spectra.emplace_back(std::string(variant_name(r.variant)), noise_out);

    Json entry;
    entry["variant"] = std::string(variant_name(r.variant));
    entry["alpha"] = r.alpha;
    if (r.calibration) entry["calibration"] = calibration_json(*r.calibration);
    const double unconverged = r.solution.unconverged_fraction();
    entry["unconverged_fraction"] = unconverged;
    entry["flagged_bins"] = std::count(r.solution.flagged.begin(), r.solution.flagged.end(), true);
    entry["metrics"] = Json::parse(to_json(r.metrics));
    report["variants"].push_back(std::move(entry));

    if (unconverged > kMaxUnconvergedFraction) {
      warn_unconverged(log, r.variant, unconverged);
      code = kExitNotConverged;
    }
    log << variant_name(r.variant) << ": alpha " << format_double(r.alpha) << ", SNR L/R "
        << format_double(r.metrics.snr_l) << " / " << format_double(r.metrics.snr_r) << " dB\n";
  }
  {
    auto out = open_output(out_dir / "ic_spectrum.csv");
    write_ic_spectrum_csv(out, ic_spectrum(spectra));
  }
  write_text(out_dir / "metrics.json", report.dump(2) + "\n");
  return code;
}

int run_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  validate(cfg);
  std::vector<double> alphas;
  for (double a : cfg.alphas) {
    if (std::find(alphas.begin(), alphas.end(), a) == alphas.end()) {
      alphas.push_back(a);
    } else {
      log << "warning: duplicate alpha " << format_double(a) << " ignored\n";
    }
  }
  if (alphas.size() < 2) throw ConfigError("run.alphas", "a sweep needs at least two distinct values");

  const Prepared p = prepare(cfg);
  const EvaluationScene scene(p.scene.x, p.scene.v, p.scene.vad, p.q, cfg.cue_cutoff);

  std::vector<std::pair<Variant, std::vector<SweepRow>>> tables;
  for (Variant v : cfg.variants) {
    tables.emplace_back(v, alpha_sweep(cost_spec(cfg, v, 0.0), p.phi, scene, alphas, cfg.stft, cfg.solver));
  }

  make_output_dir(out_dir);
  int code = kExitOk;
  for (const auto& [v, rows] : tables) {
    auto out = open_output(out_dir / ("sweep_" + variant_slug(v) + ".csv"));
    write_sweep_csv(out, rows);
    for (const auto& row : rows) {
      if (row.unconverged_fraction > kMaxUnconvergedFraction) {
        log << "alpha " << format_double(row.alpha) << ": ";
        warn_unconverged(log, v, row.unconverged_fraction);
        code = kExitNotConverged;
      }
    }
    log << variant_name(v) << ": " << rows.size() << " sweep rows\n";
  }
  return code;
}

int run_calibrate(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  validate(cfg);
  if (std::none_of(cfg.variants.begin(), cfg.variants.end(), penalized)) {
    throw ConfigError("run.variants", "calibration needs MWF-ITD or MWF-IC");
  }
  const Prepared p = prepare(cfg);
  const EvaluationScene scene(p.scene.x, p.scene.v, p.scene.vad, p.q, cfg.cue_cutoff);

  CalibrationOptions opts;
  opts.loss_fraction = cfg.calibrate.value_or(opts.loss_fraction);
  Json report;
  report["seed"] = cfg.seed;
  report["worst_ear"] = ear_name(p.scene.worst_ear);
  report["loss_fraction"] = opts.loss_fraction;
  report["variants"] = Json::array();
  for (Variant v : cfg.variants) {
    if (!penalized(v)) continue;
    const CalibrationResult c =
        calibrate_alpha(cost_spec(cfg, v, 0.0), p.phi, scene, p.scene.worst_ear, cfg.stft, cfg.solver, opts);
    Json entry;
    entry["variant"] = std::string(variant_name(v));
    entry.update(calibration_json(c));
    report["variants"].push_back(std::move(entry));
    if (!c.warning.empty()) log << "warning: " << variant_name(v) << ": " << c.warning << '\n';
    log << variant_name(v) << ": alpha " << format_double(c.alpha) << ", loss "
        << format_double(100.0 * c.achieved_loss) << "%\n";
  }
  make_output_dir(out_dir);
  write_text(out_dir / "calibration.json", report.dump(2) + "\n");
  return kExitOk;
}

int run_phase_pdf(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  RatioPhaseParams params;
  params.rho = std::polar(cfg.phase.rho, cfg.phase.rho_angle);
  try {
    params.validate(true);
  } catch (const InvalidInput& e) {
    throw ConfigError("phase.rho", e.what());
  }

  const std::size_t g = cfg.phase.grid_points;
  const double width = 2.0 * std::numbers::pi / static_cast<double>(g);
  const auto theta = sample_ratio_phase(params, cfg.phase.samples, derive_seed(cfg.seed, "phase-pdf"));
  std::vector<std::size_t> counts(g, 0);
  for (double t : theta) {
    // Cell i is centred on -pi + (i + 1) * width; the last cell wraps onto pi.
    auto i = static_cast<long long>(std::llround((t + std::numbers::pi) / width)) - 1;
    i = ((i % static_cast<long long>(g)) + static_cast<long long>(g)) % static_cast<long long>(g);
    ++counts[static_cast<std::size_t>(i)];
  }

  make_output_dir(out_dir);
  auto out = open_output(out_dir / "phase_pdf.csv");
  out << "theta,analytic,monte_carlo\n";
  const double n = static_cast<double>(cfg.phase.samples);
  for (std::size_t i = 0; i < g; ++i) {
    const double t = i + 1 == g ? std::numbers::pi : -std::numbers::pi + static_cast<double>(i + 1) * width;
    out << format_double(t) << ',' << format_double(phase_pdf(t, params)) << ','
        << format_double(static_cast<double>(counts[i]) / (n * width)) << '\n';
  }
  if (!out) throw IoError("write failed: phase_pdf.csv");
  log << "phase density: " << g << " grid points, " << cfg.phase.samples << " samples\n";
  return kExitOk;
}

}  // namespace binmwf::app
