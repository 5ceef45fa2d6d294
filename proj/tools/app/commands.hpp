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

#include <filesystem>
#include <iosfwd>

#include "config.hpp"

namespace binmwf::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidConfig = 1,
  kExitIo = 2,
  kExitNotConverged = 3,
};

/// Bins allowed to miss the gradient tolerance before a run reports failure.
inline constexpr double kMaxUnconvergedFraction = 0.10;

/// Enhanced WAVs, metrics.json and per-bin CSVs for every configured variant.
int run_process(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

/// One sweep_<variant>.csv per variant over run.alphas.
int run_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

/// calibration.json with the weighting factor of each penalized variant.
int run_calibrate(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

/// phase_pdf.csv: analytic and sampled density of the interaural phase.
int run_phase_pdf(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

/// File-name form of a variant: mwf, mwf-itd, mwf-ic.
std::string variant_slug(Variant v);

}  // namespace binmwf::app
