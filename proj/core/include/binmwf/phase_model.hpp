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

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace binmwf {

/// Two zero-mean circularly-symmetric complex normals x, y with
/// E{|x|^2} = sigma_x^2, E{|y|^2} = sigma_y^2 and E{x y*} = rho sigma_x sigma_y.
struct RatioPhaseParams {
  std::complex<double> rho{0.0, 0.0};
  double sigma_x = 1.0;
  double sigma_y = 1.0;

  /// |rho| <= 1 and positive scales; `strict` additionally rejects |rho| = 1.
  void validate(bool strict) const;
};

/// Marginal density of theta = arg(x / y) on (-pi, pi]. Requires |rho| < 1.
double phase_pdf(double theta, const RatioPhaseParams& params);

/// n correlated pairs (x, y), colored from independent unit normals through
/// the symmetric square root of the 4x4 real covariance of
/// [Re x, Im x, Re y, Im y].
std::vector<std::pair<std::complex<double>, std::complex<double>>> sample_ratio_pairs(const RatioPhaseParams& params,
                                                                                      std::size_t n,
                                                                                      std::uint64_t seed);

/// arg(x / y) for n sampled pairs, in (-pi, pi].
std::vector<double> sample_ratio_phase(const RatioPhaseParams& params, std::size_t n, std::uint64_t seed);

/// 1 - |mean(exp(j theta))|.
double circular_variance(const std::vector<double>& phases);

struct PhaseVariancePoint {
  double magnitude = 0.0;
  double circular_variance = 0.0;
};

/// Circular variance of sampled phases for each |rho| at a fixed angle of rho.
std::vector<PhaseVariancePoint> phase_variance_curve(const std::vector<double>& magnitudes, std::size_t n,
                                                     std::uint64_t seed, double rho_angle = 0.7853981633974483);

}  // namespace binmwf
