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

#include "binmwf/phase_model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "binmwf/error.hpp"
#include "binmwf/rng.hpp"

namespace binmwf {
namespace {

constexpr std::size_t kChunk = 1 << 16;

// [eta acos(-eta) / sqrt(1 - eta^2) + 1] / (1 - eta^2), which stays finite
// as eta -> -1 although both terms of the bracket cancel there.
double phase_kernel(double eta) {
  const double x = 1.0 + eta;
  if (x < 1e-4) return 1.0 / 3.0 + x * (4.0 / 15.0 + x * (6.0 / 35.0));
  const double s2 = 1.0 - eta * eta;
  return (eta * std::acos(-eta) / std::sqrt(s2) + 1.0) / s2;
}

}  // namespace

void RatioPhaseParams::validate(bool strict) const {
  const double r = std::abs(rho);
  if (!std::isfinite(r) || r > 1.0 || (strict && r >= 1.0)) {
    throw InvalidInput(strict ? "ratio phase: |rho| must be < 1" : "ratio phase: |rho| must be <= 1");
  }
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) throw InvalidInput("ratio phase: scales must be > 0");
}

double phase_pdf(double theta, const RatioPhaseParams& params) {
  params.validate(true);
  const double r = std::abs(params.rho);
  const double eta = r * std::cos(std::arg(params.rho) - theta);
  return (1.0 - r * r) / (2.0 * std::numbers::pi) * phase_kernel(eta);
}

std::vector<std::pair<std::complex<double>, std::complex<double>>> sample_ratio_pairs(const RatioPhaseParams& params,
                                                                                      std::size_t n,
                                                                                      std::uint64_t seed) {
  params.validate(false);
  if (n == 0) throw InvalidInput("ratio phase: n must be >= 1");

  const double sx2 = params.sigma_x * params.sigma_x;
  const double sy2 = params.sigma_y * params.sigma_y;
  const std::complex<double> c = params.rho * params.sigma_x * params.sigma_y;
  Eigen::Matrix4d cov;
  // Order: Re x, Im x, Re y, Im y. Circular symmetry fixes the 2x2 blocks.
  cov << sx2 / 2, 0.0, c.real() / 2, -c.imag() / 2,
         0.0, sx2 / 2, c.imag() / 2, c.real() / 2,
         c.real() / 2, c.imag() / 2, sy2 / 2, 0.0,
         -c.imag() / 2, c.real() / 2, 0.0, sy2 / 2;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(cov);
  const Eigen::Matrix4d root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                               eig.eigenvectors().transpose();

  std::vector<std::pair<std::complex<double>, std::complex<double>>> out(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t start = 0, chunk = 0; start < n; start += kChunk, ++chunk) {
    std::mt19937_64 gen(derive_seed(seed, "ratio/" + std::to_string(chunk)));
    const std::size_t end = std::min(n, start + kChunk);
    for (std::size_t i = start; i < end; ++i) {
      const Eigen::Vector4d u(normal(gen), normal(gen), normal(gen), normal(gen));
      const Eigen::Vector4d z = root * u;
      out[i] = {{z(0), z(1)}, {z(2), z(3)}};
    }
  }
  return out;
}

std::vector<double> sample_ratio_phase(const RatioPhaseParams& params, std::size_t n, std::uint64_t seed) {
  const auto pairs = sample_ratio_pairs(params, n, seed);
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::arg(pairs[i].first * std::conj(pairs[i].second));
    if (a == -std::numbers::pi) a = std::numbers::pi;
    theta[i] = a;
  }
  return theta;
}

double circular_variance(const std::vector<double>& phases) {
  if (phases.empty()) throw InvalidInput("circular_variance: no samples");
  double c = 0.0;
  double s = 0.0;
  for (double p : phases) {
    c += std::cos(p);
    s += std::sin(p);
  }
  const double n = static_cast<double>(phases.size());
  return 1.0 - std::hypot(c, s) / n;
}

std::vector<PhaseVariancePoint> phase_variance_curve(const std::vector<double>& magnitudes, std::size_t n,
                                                     std::uint64_t seed, double rho_angle) {
  std::vector<PhaseVariancePoint> out;
  out.reserve(magnitudes.size());
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    const double r = magnitudes[i];
    if (!(r >= 0.0 && r < 1.0)) throw InvalidInput("phase_variance_curve: magnitudes must lie in [0, 1)");
    RatioPhaseParams p;
    p.rho = std::polar(r, rho_angle);
    const auto theta = sample_ratio_phase(p, n, derive_seed(seed, "curve/" + std::to_string(i)));
    out.push_back({r, circular_variance(theta)});
  }
  return out;
}

}  // namespace binmwf
