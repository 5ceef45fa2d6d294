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

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "binmwf/filter_pair.hpp"
#include "binmwf/spatial_stats.hpp"

namespace binmwf {

enum class Variant { kMwf, kMwfItd, kMwfIc };

std::string_view variant_name(Variant v);
/// Accepts "MWF", "MWF-ITD", "MWF-IC" (case-insensitive).
Variant parse_variant(std::string_view name);

struct CostSpec {
  Variant variant = Variant::kMwf;
  double alpha = 0.0;  // same for every bin
  double cue_cutoff = kCueCutoffHz;

  void validate() const;
};

/// Value and gradient with respect to the stacked real parameters
/// [Re w_L; Im w_L; Re w_R; Im w_R].
struct CostEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  /// Set when a penalty hit its degenerate-denominator guard.
  bool singular = false;
};

/// Coherence matrices of one bin.
struct BinCoherence {
  const Eigen::MatrixXcd& phi_yy;
  const Eigen::MatrixXcd& phi_xx;
  const Eigen::MatrixXcd& phi_vv;
  double frequency = 0.0;

  static BinCoherence of(const CoherenceSet& set, std::size_t k, const StftConfig& cfg) {
    return {set.phi_yy[k], set.phi_xx[k], set.phi_vv[k], cfg.bin_frequency(k)};
  }
};

/// Penalty value returned when the output noise power falls below the guard.
inline constexpr double kDegeneratePenalty = 1e6;

Eigen::VectorXd pack(const FilterPair& w);
FilterPair unpack(const Eigen::VectorXd& params, Eigen::Index channels);

/// Binaural MWF mean-square error as the expanded quadratic form.
CostEval j_w(const FilterPair& w, const BinCoherence& phi, const Selector& q);

/// Squared wrapped difference between output and input noise IPD.
CostEval j_ipd(const FilterPair& w, const Eigen::MatrixXcd& phi_vv, const Selector& q);

/// Squared modulus of the difference between output and input noise IC.
CostEval j_ic(const FilterPair& w, const Eigen::MatrixXcd& phi_vv, const Selector& q);

/// J_W plus alpha times the variant's penalty; the penalty only applies to
/// bins with 0 < f <= cue_cutoff.
CostEval combined(const FilterPair& w, const BinCoherence& phi, const Selector& q, const CostSpec& spec);

bool penalty_active(const CostSpec& spec, double frequency);

/// Real Jacobian of the penalty residual (the wrapped IPD difference, or the
/// real and imaginary parts of the IC difference). 2 J^T J is the
/// Gauss-Newton part of the penalty Hessian. Empty for MWF and degenerate
/// outputs.
Eigen::MatrixXd penalty_jacobian(const FilterPair& w, const Eigen::MatrixXcd& phi_vv, const Selector& q,
                                 Variant variant);

/// Real 4M x 4M Hessian of j_w (constant, block-diagonal in the two ears).
Eigen::MatrixXd j_w_hessian(const Eigen::MatrixXcd& phi_yy);

}  // namespace binmwf
