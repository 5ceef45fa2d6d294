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

#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "binmwf/error.hpp"

namespace binmwf::app {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "inf" || v == "+inf") return HUGE_VAL;
  if (v == "-inf") return -HUGE_VAL;
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || std::isnan(out)) throw ConfigError(key, "expected a number, got '" + value + "'");
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double positive(const std::string& key, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be finite and > 0");
  return v;
}

double finite(const std::string& key, double v) {
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
  return v;
}

double azimuth(const std::string& key, double v) {
  if (!(std::abs(v) <= 90.0)) throw ConfigError(key, "azimuth must lie in [-90, 90] degrees");
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&, const std::filesystem::path&)>;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  using P = std::filesystem::path;
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v, const P&) { c.seed = parse_unsigned(k, v); }},
      {"input.speech", [](RunConfig& c, const std::string&, const std::string& v, const P& b) { c.speech = resolve(b, v); }},
      {"input.duration",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.duration = positive(k, parse_double(k, v));
       }},
      {"input.speech_ir",
       [](RunConfig& c, const std::string&, const std::string& v, const P& b) { c.speech_ir = resolve(b, v); }},
      {"input.noise_ir",
       [](RunConfig& c, const std::string&, const std::string& v, const P& b) { c.noise_ir = resolve(b, v); }},
      {"scene.speech_azimuth",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.scene.speech_azimuth = azimuth(k, parse_double(k, v));
       }},
      {"scene.noise_azimuth",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.scene.noise_azimuth = azimuth(k, parse_double(k, v));
       }},
      {"scene.speech_distance",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.scene.speech_distance = positive(k, parse_double(k, v));
       }},
      {"scene.noise_distance",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.scene.noise_distance = positive(k, parse_double(k, v));
       }},
      {"scene.target_snr_worst_ear",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         const double x = parse_double(k, v);
         if (x == -HUGE_VAL) throw ConfigError(k, "must be finite or +inf");
         c.scene.target_snr_worst_ear = x;
       }},
      {"scene.noise_cutoff",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.scene.noise_cutoff = positive(k, parse_double(k, v));
       }},
      {"scene.sensor_noise_db",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         const double x = parse_double(k, v);
         if (x == HUGE_VAL) throw ConfigError(k, "must be finite or -inf");
         c.scene.sensor_noise_db = x;
       }},
      {"scene.vad_threshold_db",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         const double x = parse_double(k, v);
         if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError(k, "must be finite and >= 0");
         c.scene.vad_threshold_db = x;
       }},
      {"geometry.mics_per_ear",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         const auto n = parse_unsigned(k, v);
         if (n < 1 || n > 64) throw ConfigError(k, "must be between 1 and 64");
         c.geometry.mics_per_ear = n;
       }},
      {"geometry.intra_array_spacing",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.geometry.intra_array_spacing = positive(k, parse_double(k, v));
       }},
      {"geometry.head_radius",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.geometry.head_radius = positive(k, parse_double(k, v));
       }},
      {"geometry.sound_speed",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.geometry.sound_speed = positive(k, parse_double(k, v));
       }},
      {"stft.fft_size",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) { c.stft.fft_size = parse_unsigned(k, v); }},
      {"stft.window_len",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.stft.window_len = parse_unsigned(k, v);
       }},
      {"stft.hop", [](RunConfig& c, const std::string& k, const std::string& v, const P&) { c.stft.hop = parse_unsigned(k, v); }},
      {"stft.sample_rate",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.stft.sample_rate = positive(k, parse_double(k, v));
       }},
      {"stft.window",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         if (v == "sqrt-hann") {
           c.stft.window = WindowKind::kSqrtHann;
         } else if (v == "rectangular") {
           c.stft.window = WindowKind::kRectangular;
         } else {
           throw ConfigError(k, "expected sqrt-hann or rectangular, got '" + v + "'");
         }
       }},
      {"solver.max_iterations",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         const auto n = parse_unsigned(k, v);
         if (n < 1 || n > 1000000) throw ConfigError(k, "must be between 1 and 1000000");
         c.solver.max_iterations = static_cast<int>(n);
       }},
      {"solver.gradient_tolerance",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.solver.gradient_tolerance = positive(k, parse_double(k, v));
       }},
      {"solver.precondition",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.solver.precondition = parse_bool(k, v);
       }},
      {"run.variants",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.variants.clear();
         for (const auto& name : split_list(v)) {
           try {
             const Variant var = parse_variant(name);
             if (std::find(c.variants.begin(), c.variants.end(), var) == c.variants.end()) c.variants.push_back(var);
           } catch (const InvalidInput& e) {
             throw ConfigError(k, e.what());
           }
         }
         if (c.variants.empty()) throw ConfigError(k, "at least one variant is required");
       }},
      {"run.alpha",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         const double a = finite(k, parse_double(k, v));
         if (a < 0.0) throw ConfigError(k, "must be >= 0");
         c.alpha = a;
       }},
      {"run.alphas",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.alphas.clear();
         for (const auto& item : split_list(v)) {
           const double a = finite(k, parse_double(k, item));
           if (a < 0.0) throw ConfigError(k, "values must be >= 0");
           c.alphas.push_back(a);
         }
       }},
      {"run.calibrate",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         const double f = parse_double(k, v);
         if (!(f >= 0.0 && f < 1.0)) throw ConfigError(k, "loss fraction must lie in [0, 1)");
         c.calibrate = f;
       }},
      {"run.cue_cutoff",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.cue_cutoff = positive(k, parse_double(k, v));
       }},
      {"phase.rho",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         const double r = parse_double(k, v);
         if (!(r >= 0.0 && r < 1.0)) throw ConfigError(k, "|rho| must lie in [0, 1)");
         c.phase.rho = r;
       }},
      {"phase.rho_angle",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         c.phase.rho_angle = finite(k, parse_double(k, v));
       }},
      {"phase.samples",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         const auto n = parse_unsigned(k, v);
         if (n < 1) throw ConfigError(k, "must be >= 1");
         c.phase.samples = n;
       }},
      {"phase.grid_points",
       [](RunConfig& c, const std::string& k, const std::string& v, const P&) {
         const auto n = parse_unsigned(k, v);
         if (n < 2) throw ConfigError(k, "must be >= 2");
         c.phase.grid_points = n;
       }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, s] : setters()) out.push_back(k);
    return out;
  }();
  return keys;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  std::map<std::string, const Setter*> index;
  for (const auto& [k, s] : setters()) index.emplace(k, &s);

  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    const auto it = index.find(key);
    if (it == index.end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
    if (value.empty()) throw ConfigError(key, "missing value");
    (*it->second)(cfg, key, value, base_dir);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

void validate(const RunConfig& cfg) {
  try {
    cfg.stft.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError("stft", e.what());
  }
  try {
    cfg.geometry.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError("geometry", e.what());
  }
  try {
    cfg.scene.validate(cfg.stft);
  } catch (const InvalidInput& e) {
    throw ConfigError("scene", e.what());
  }
  if (!(cfg.cue_cutoff < 0.5 * cfg.stft.sample_rate)) throw ConfigError("run.cue_cutoff", "must be below Nyquist");

  const auto check_file = [](const std::string& key, const std::optional<std::filesystem::path>& p) {
    if (p && !std::filesystem::is_regular_file(*p)) throw ConfigError(key, "file not found: '" + p->string() + "'");
  };
  check_file("input.speech", cfg.speech);
  check_file("input.speech_ir", cfg.speech_ir);
  check_file("input.noise_ir", cfg.noise_ir);
}

}  // namespace binmwf::app
