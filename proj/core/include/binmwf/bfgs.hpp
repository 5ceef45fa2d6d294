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

#include <functional>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace binmwf {

/// Objective returning f(x) and writing its gradient into `grad`.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BfgsOptions {
  int max_iterations = 500;
  /// Stop when ||grad||_2 <= gradient_tolerance * max(1, |f|).
  double gradient_tolerance = 1e-8;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature
  int max_line_search = 50;
};

enum class BfgsStatus { kConverged, kMaxIterations, kLineSearchFailed, kNonFinite };

std::string_view status_name(BfgsStatus s);

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  BfgsStatus status = BfgsStatus::kMaxIterations;

  bool converged() const { return status == BfgsStatus::kConverged; }
};

/// Quasi-Newton minimization with a strong-Wolfe line search. When
/// `inverse_hessian` is given it seeds the inverse-Hessian approximation;
/// otherwise the identity is used, rescaled after the first step.
BfgsResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& options,
                         const std::optional<Eigen::MatrixXd>& inverse_hessian = std::nullopt);

}  // namespace binmwf
