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
#include <string>
#include <vector>

#include "binmwf/bfgs.hpp"
#include "binmwf/costs.hpp"
#include "binmwf/metrics.hpp"
#include "binmwf/spatial_stats.hpp"

namespace binmwf {

struct SolverConfig {
  int max_iterations = 500;
  /// Relative to max(1, |J|).
  double gradient_tolerance = 1e-8;
  /// Seed BFGS with the inverse of the J_W Hessian plus the Gauss-Newton
  /// penalty term instead of the identity.
  bool precondition = true;

  void validate() const;
  BfgsOptions bfgs_options() const;
};

/// Added to the diagonal of a near-singular phi_yy, relative to trace / M.
inline constexpr double kDiagonalLoading = 1e-10;

/// Closed-form minimizer of J_W: w = phi_yy^-1 phi_xx q. Sets `flagged` and
/// returns the selectors when phi_yy stays singular after loading.
FilterPair mwf_closed_form(const Eigen::MatrixXcd& phi_yy, const Eigen::MatrixXcd& phi_xx, const Selector& q,
                           bool* flagged = nullptr);

FilterBank mwf_closed_form(const CoherenceSet& phi, const Selector& q, std::vector<bool>* flagged = nullptr);

struct BinSolution {
  FilterPair filters;
  double cost = 0.0;
  double initial_cost = 0.0;
  int iterations = 0;
  bool converged = true;
  bool flagged = false;
};

/// Optimal filters of one bin. MWF uses the closed form; penalized variants
/// run BFGS from `start` (default: the closed form).
BinSolution solve_bin(const CostSpec& spec, const BinCoherence& phi, const Selector& q, const SolverConfig& cfg,
                      const FilterPair* start = nullptr);

struct SolveResult {
  FilterBank filters;
  std::vector<double> cost;
  std::vector<int> iterations;
  std::vector<bool> converged;
  std::vector<bool> flagged;

  double unconverged_fraction() const;
};

SolveResult solve(const CostSpec& spec, const CoherenceSet& phi, const Selector& q, const StftConfig& stft,
                  const SolverConfig& cfg);

struct CalibrationOptions {
  double loss_fraction = 0.15;
  double alpha_min = 1e-3;
  double alpha_max = 1e5;
  int points_per_decade = 4;
  int refinements = 3;
};

struct CalibrationResult {
  double alpha = 0.0;
  double mwf_snr_db = 0.0;
  double snr_db = 0.0;
  double achieved_loss = 0.0;  // (SNR_MWF - SNR) / SNR_MWF on the dB scale
  bool at_boundary = false;
  std::string warning;
};

/// Largest alpha whose worst-ear output SNR stays within `loss_fraction` of
/// the MWF worst-ear SNR: scan a log grid, then bisect the first crossing.
CalibrationResult calibrate_alpha(const CostSpec& base, const CoherenceSet& phi, const EvaluationScene& scene,
                                  Ear worst, const StftConfig& stft, const SolverConfig& cfg,
                                  const CalibrationOptions& options = {});

struct SweepRow {
  double alpha = 0.0;
  MetricsReport metrics;
  double unconverged_fraction = 0.0;
};

std::vector<SweepRow> alpha_sweep(const CostSpec& spec, const CoherenceSet& phi, const EvaluationScene& scene,
                                  const std::vector<double>& alphas, const StftConfig& stft,
                                  const SolverConfig& cfg);

/// Columns: alpha, snr_l_db, snr_r_db, disnr_l_db, disnr_r_db, ditd_s,
/// ditd_n, dmsc_s, dmsc_n.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace binmwf
