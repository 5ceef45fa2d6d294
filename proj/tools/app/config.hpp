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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "binmwf/costs.hpp"
#include "binmwf/scene.hpp"
#include "binmwf/solver.hpp"
#include "binmwf/stft.hpp"

namespace binmwf::app {

/// Invalid configuration; `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct PhaseSettings {
  double rho = 0.5;
  double rho_angle = 0.7853981633974483;  // rad
  std::size_t samples = 1000000;
  std::size_t grid_points = 360;
};

struct RunConfig {
  /// Speech WAV; a synthetic utterance of `duration` seconds when absent.
  std::optional<std::filesystem::path> speech;
  double duration = 6.0;
  std::optional<std::filesystem::path> speech_ir;
  std::optional<std::filesystem::path> noise_ir;

  SceneSpec scene;
  ArrayGeometry geometry;
  StftConfig stft;
  SolverConfig solver;

  std::vector<Variant> variants{Variant::kMwf};
  std::optional<double> alpha;
  std::vector<double> alphas;
  std::optional<double> calibrate;  // loss fraction
  double cue_cutoff = kCueCutoffHz;

  PhaseSettings phase;
  std::uint64_t seed = 1;
};

/// Parses flat `section.key = value` text. Blank lines and lines starting
/// with '#' are ignored; relative paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Reads and parses a config file. A missing file is a ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Cross-field checks shared by every command.
void validate(const RunConfig& cfg);

/// Every accepted key, in documentation order.
const std::vector<std::string>& known_keys();

}  // namespace binmwf::app
