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

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include "binmwf/error.hpp"
#include "binmwf/spatial_stats.hpp"
#include "support/oracles.hpp"

using namespace binmwf;
using oracle::cd;

namespace {

VadLabels alternating(std::size_t frames) {
  VadLabels vad;
  vad.active.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) vad.active[f] = f % 2 == 0;
  return vad;
}

StftConfig small_config() {
  StftConfig cfg;
  cfg.fft_size = 8;
  cfg.window_len = 8;
  cfg.hop = 4;
  return cfg;
}

std::vector<Eigen::MatrixXcd> constant_bins(const Eigen::MatrixXcd& phi, const StftConfig& cfg) {
  return std::vector<Eigen::MatrixXcd>(cfg.bin_count(), phi);
}

FilterBank constant_filters(const FilterPair& w, const StftConfig& cfg) {
  return FilterBank(cfg.bin_count(), w);
}

}  // namespace

TEST_CASE("wrap_angle range") {
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(3.0 * std::numbers::pi / 2.0) == doctest::Approx(-std::numbers::pi / 2.0));
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(gen);
    const double w = wrap_angle(a);
    CHECK(w > -std::numbers::pi);
    CHECK(w <= std::numbers::pi);
    CHECK(std::abs(oracle::wrap(a) - w) < 1e-9);
  }
}

TEST_CASE("selector has a single unit entry") {
  const auto q = Selector::from_geometry(ArrayGeometry{});
  CHECK(q.left.size() == 6);
  CHECK(q.left.sum() == 1.0);
  CHECK(q.right.sum() == 1.0);
  CHECK(q.left(0) == 1.0);
  CHECK(q.right(3) == 1.0);
  CHECK_THROWS_AS(Selector::make(4, 0, 4), InvalidInput);
}

TEST_CASE("independent white channels give identity coherence") {
  const std::size_t frames = 20000;
  SpectralTensor t(2, frames, small_config());
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  for (auto& c : t.data()) c = cd(n(gen), n(gen));
  const auto set = estimate_coherence(t, alternating(frames));
  CHECK(set.noise_frames == 10000);
  for (const auto& phi : set.phi_vv) {
    CHECK(std::abs(phi(0, 0) - 1.0) < 0.05);
    CHECK(std::abs(phi(1, 1) - 1.0) < 0.05);
    CHECK(std::abs(phi(0, 1)) < 0.05);
  }
}

TEST_CASE("single-source noise gives a rank-one coherence") {
  const std::size_t frames = 20000;
  const auto cfg = small_config();
  std::mt19937_64 gen(4);
  const Eigen::VectorXcd h = oracle::random_vector(gen, 4);
  const double sigma2 = 2.5;
  std::normal_distribution<double> n(0.0, std::sqrt(sigma2 / 2.0));
  SpectralTensor t(4, frames, cfg);
  for (std::size_t f = 0; f < frames; ++f)
    for (std::size_t k = 0; k < cfg.bin_count(); ++k) {
      const cd s(n(gen), n(gen));
      for (std::size_t m = 0; m < 4; ++m) t.at(m, f, k) = h(static_cast<Eigen::Index>(m)) * s;
    }
  const auto set = estimate_coherence(t, alternating(frames));
  const Eigen::MatrixXcd expect = oracle::rank_one(h, sigma2);
  for (const auto& phi : set.phi_vv) CHECK((phi - expect).norm() / expect.norm() < 0.05);
}

TEST_CASE("coherence invariants on random data") {
  const std::size_t frames = 300;
  SpectralTensor t(3, frames, small_config());
  std::mt19937_64 gen(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& c : t.data()) c = cd(n(gen), n(gen));
  const auto set = estimate_coherence(t, alternating(frames));
  for (std::size_t k = 0; k < set.bins(); ++k) {
    for (const auto* mats : {&set.phi_yy, &set.phi_vv, &set.phi_xx}) {
      const auto& phi = (*mats)[k];
      CHECK((phi - phi.adjoint()).norm() <= 1e-12 * phi.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(phi);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * phi.trace().real());
    }
  }
}

TEST_CASE("zero tensor gives zero matrices") {
  SpectralTensor t(2, 10, small_config());
  const auto set = estimate_coherence(t, alternating(10));
  for (std::size_t k = 0; k < set.bins(); ++k) {
    CHECK(set.phi_yy[k].norm() == 0.0);
    CHECK(set.phi_vv[k].norm() == 0.0);
    CHECK(set.phi_xx[k].norm() == 0.0);
  }
}

TEST_CASE("estimate_coherence needs both frame classes") {
  SpectralTensor t(2, 10, small_config());
  VadLabels vad;
  vad.active.assign(10, true);
  vad.active[0] = false;
  CHECK_THROWS_AS(estimate_coherence(t, vad), InvalidInput);
  vad.active.resize(9);
  CHECK_THROWS_AS(estimate_coherence(t, vad), InvalidInput);
}

TEST_CASE("psd_floor clamps negative eigenvalues") {
  Eigen::MatrixXcd a(2, 2);
  a << cd(1.0, 0.0), cd(0.0, 0.0), cd(0.0, 0.0), cd(-2.0, 0.0);
  const auto f = psd_floor(a);
  CHECK(std::abs(f(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(f(1, 1)) < 1e-14);
}

TEST_CASE("input cues of a rank-one matrix") {
  const StftConfig cfg;
  std::mt19937_64 gen(12);
  const auto q = Selector::make(6, 0, 3);
  const Eigen::VectorXcd h = oracle::random_vector(gen, 6);
  const auto cues = input_cues(constant_bins(oracle::rank_one(h, 3.0), cfg), q, cfg);
  const double ipd = std::arg(h(0) * std::conj(h(3)));
  for (std::size_t k = 1; k < cues.bins(); ++k) {
    if (cfg.bin_frequency(k) > 1500.0) {
      CHECK_FALSE(cues.valid[k]);
      CHECK(std::isnan(cues.itd[k]));
      continue;
    }
    REQUIRE(cues.valid[k]);
    CHECK(std::abs(cues.ic[k]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(oracle::wrap(std::arg(cues.ic[k]) - cues.ipd[k])) < 1e-12);
    CHECK(std::abs(oracle::wrap(cues.ipd[k] - ipd)) < 1e-12);
    CHECK(cues.itd[k] == doctest::Approx(cues.ipd[k] / (2.0 * std::numbers::pi * cfg.bin_frequency(k))));
  }
  CHECK_FALSE(cues.valid[0]);
}

TEST_CASE("input cues of the identity") {
  const StftConfig cfg;
  const auto cues = input_cues(constant_bins(Eigen::MatrixXcd::Identity(6, 6), cfg), Selector::make(6, 0, 3), cfg);
  for (std::size_t k = 1; k < cues.bins(); ++k) {
    CHECK(cues.ic[k] == cd{});
    CHECK_FALSE(cues.phase_defined[k]);
  }
}

TEST_CASE("input cues of a 2x2 matrix") {
  const StftConfig cfg;
  Eigen::MatrixXcd phi(2, 2);
  const cd off = std::polar(0.5, std::numbers::pi / 4.0);
  phi << 1.0, off, std::conj(off), 1.0;
  const auto cues = input_cues(constant_bins(phi, cfg), Selector::make(2, 0, 1), cfg);
  CHECK(std::abs(cues.ic[10] - off) < 1e-15);
  CHECK(cues.ipd[10] == doctest::Approx(std::numbers::pi / 4.0));
  CHECK(cues.phase_defined[10]);
}

TEST_CASE("zero reference power flags the bin instead of throwing") {
  const StftConfig cfg;
  Eigen::MatrixXcd phi = Eigen::MatrixXcd::Identity(2, 2);
  phi(0, 0) = 0.0;
  const auto cues = input_cues(constant_bins(phi, cfg), Selector::make(2, 0, 1), cfg);
  for (std::size_t k = 0; k < cues.bins(); ++k) CHECK_FALSE(cues.valid[k]);
  CHECK(cues.valid_count() == 0);
}

TEST_CASE("output cues") {
  const StftConfig cfg;
  std::mt19937_64 gen(13);
  const auto q = Selector::make(6, 0, 3);
  const Eigen::MatrixXcd phi = oracle::random_psd(gen, 6);
  const auto bins = constant_bins(phi, cfg);

  SUBCASE("identity filters reproduce the input cues") {
    const auto in = input_cues(bins, q, cfg);
    const auto out = output_cues(bins, constant_filters(q.as_filters(), cfg), cfg);
    for (std::size_t k = 0; k < in.bins(); ++k) {
      CHECK(in.valid[k] == out.valid[k]);
      CHECK(std::abs(in.ic[k] - out.ic[k]) < 1e-14);
      CHECK(in.ipd[k] == doctest::Approx(out.ipd[k]));
    }
  }
  SUBCASE("equal filters give unit coherence and zero phase") {
    const Eigen::VectorXcd w = oracle::random_vector(gen, 6);
    const auto out = output_cues(bins, constant_filters({w, w}, cfg), cfg);
    for (std::size_t k = 1; k < out.bins(); ++k) {
      if (!out.valid[k]) continue;
      CHECK(std::abs(out.ic[k] - 1.0) < 1e-12);
      CHECK(std::abs(out.ipd[k]) < 1e-12);
    }
  }
  SUBCASE("rotating the right filter shifts the output phase by the rotation") {
    const FilterPair w{oracle::random_vector(gen, 6), oracle::random_vector(gen, 6)};
    const auto base = output_cues(bins, constant_filters(w, cfg), cfg);
    for (double phase : {0.3, -1.1, 2.9}) {
      FilterPair r = w;
      r.right *= std::polar(1.0, phase);
      const auto rot = output_cues(bins, constant_filters(r, cfg), cfg);
      for (std::size_t k = 1; k < rot.bins(); ++k) {
        if (!rot.valid[k]) continue;
        CHECK(std::abs(oracle::wrap(rot.ipd[k] - base.ipd[k] - phase)) < 1e-12);
        CHECK(std::abs(rot.ic[k]) == doctest::Approx(std::abs(base.ic[k])));
      }
    }
  }
}

TEST_CASE("coherence magnitude bounded and scale invariant") {
  const StftConfig cfg;
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXcd phi = oracle::random_psd(gen, 6, 0.0);
    std::vector<Eigen::MatrixXcd> bins{phi, phi};
    StftConfig c = cfg;
    const FilterPair w{oracle::random_vector(gen, 6), oracle::random_vector(gen, 6)};
    const auto out = output_cues(bins, {w, w}, c);
    const auto in = input_cues(bins, Selector::make(6, 0, 3), c);
    CHECK(std::abs(out.ic[1]) <= 1.0 + 1e-9);
    CHECK(std::abs(in.ic[1]) <= 1.0 + 1e-9);
    std::vector<Eigen::MatrixXcd> scaled{7.5 * phi, 7.5 * phi};
    const auto in2 = input_cues(scaled, Selector::make(6, 0, 3), c);
    CHECK(std::abs(in2.ic[1] - in.ic[1]) < 1e-12);
    CHECK(std::abs(oracle::wrap(in2.ipd[1] - in.ipd[1])) < 1e-12);
  }
}

TEST_CASE("phase dispersion grows as coherence falls") {
  std::mt19937_64 gen(15);
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  double prev = -1.0;
  for (double mag : {0.99, 0.9, 0.5, 0.2}) {
    const cd rho = std::polar(mag, 0.6);
    const double s = std::sqrt(1.0 - mag * mag);
    double mean_re = 0.0;
    double mean_im = 0.0;
    const int frames = 100000;
    for (int f = 0; f < frames; ++f) {
      const cd a(n(gen), n(gen));
      const cd b(n(gen), n(gen));
      const cd left = a;
      const cd right = std::conj(rho) * a + s * b;  // E{left right*} = rho
      const double phase = std::arg(left * std::conj(right));
      mean_re += std::cos(phase);
      mean_im += std::sin(phase);
    }
    const double var = 1.0 - std::hypot(mean_re, mean_im) / frames;
    CHECK(var > prev);
    prev = var;
  }
}

TEST_CASE("cue CSV has one row per bin") {
  const StftConfig cfg;
  const auto cues = input_cues(constant_bins(Eigen::MatrixXcd::Identity(2, 2), cfg), Selector::make(2, 0, 1), cfg);
  std::ostringstream out;
  write_cues_csv(out, cues);
  std::istringstream in(out.str());
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  CHECK(line.rfind("bin,frequency_hz", 0) == 0);
  while (std::getline(in, line)) ++rows;
  CHECK(rows == cfg.bin_count());
}
