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

#include "binmwf/bfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace binmwf {
namespace {

constexpr double kValueNoise = 1e-10;

struct Point {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative
  Eigen::VectorXd grad;
};

// Minimizer of the cubic matching values and slopes at a and b, or NaN.
double cubic_minimizer(const Point& a, const Point& b) {
  const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.slope * b.slope;
  if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
  return b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
}

class LineSearch {
 public:
  LineSearch(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& p, const Point& origin,
             const BfgsOptions& opt, int& evaluations)
      : f_(f), x_(x), p_(p), origin_(origin), opt_(opt), evaluations_(evaluations) {}

  // Returns a point satisfying the strong Wolfe conditions, or the best
  // sufficient-decrease point seen, or nothing.
  std::optional<Point> run(double alpha0) {
    Point prev = origin_;
    double alpha = alpha0;
    for (int i = 0; i < opt_.max_line_search; ++i) {
      Point cur = eval(alpha);
      if (!std::isfinite(cur.value)) {
        alpha = 0.5 * (prev.alpha + alpha);
        continue;
      }
      if (approximate_wolfe(cur)) return cur;
      if (!armijo(cur) || (i > 0 && cur.value >= prev.value)) return zoom(prev, cur);
      if (std::abs(cur.slope) <= -opt_.c2 * origin_.slope) return cur;
      if (cur.slope >= 0.0) return zoom(cur, prev);
      prev = cur;
      alpha *= 2.0;
    }
    return best_;
  }

 private:
  bool armijo(const Point& pt) const {
    return pt.value <= origin_.value + opt_.c1 * pt.alpha * origin_.slope;
  }

  // Near a minimizer the change in f drops below rounding and Armijo can no
  // longer be certified; fall back on the slope (Hager-Zhang conditions).
  bool approximate_wolfe(const Point& pt) const {
    const double noise = kValueNoise * std::abs(origin_.value);
    return std::abs(pt.value - origin_.value) <= noise && pt.slope >= opt_.c2 * origin_.slope &&
           pt.slope <= (1.0 - 2.0 * opt_.c1) * -origin_.slope;
  }

  Point eval(double alpha) {
    Point pt;
    pt.alpha = alpha;
    pt.grad.resize(x_.size());
    pt.value = f_(x_ + alpha * p_, pt.grad);
    pt.slope = pt.grad.dot(p_);
    ++evaluations_;
    if (std::isfinite(pt.value) && armijo(pt) && (!best_ || pt.value < best_->value)) best_ = pt;
    return pt;
  }

  std::optional<Point> zoom(Point lo, Point hi) {
    for (int i = 0; i < opt_.max_line_search; ++i) {
      const double lo_a = std::min(lo.alpha, hi.alpha);
      const double hi_a = std::max(lo.alpha, hi.alpha);
      const double width = hi_a - lo_a;
      if (width <= 1e-16 * std::max(1.0, hi_a)) break;
      double alpha = cubic_minimizer(lo, hi);
      if (!std::isfinite(alpha) || alpha < lo_a + 0.1 * width || alpha > hi_a - 0.1 * width) {
        alpha = 0.5 * (lo.alpha + hi.alpha);
      }
      Point cur = eval(alpha);
      if (std::isfinite(cur.value) && approximate_wolfe(cur)) return cur;
      if (!std::isfinite(cur.value) || !armijo(cur) || cur.value >= lo.value) {
        hi = cur;
        if (!std::isfinite(cur.value)) hi.value = std::numeric_limits<double>::max();
      } else {
        if (std::abs(cur.slope) <= -opt_.c2 * origin_.slope) return cur;
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = cur;
      }
    }
    return best_;
  }

  const Objective& f_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& p_;
  Point origin_;
  const BfgsOptions& opt_;
  int& evaluations_;
  std::optional<Point> best_;
};

}  // namespace

std::string_view status_name(BfgsStatus s) {
  switch (s) {
    case BfgsStatus::kConverged: return "converged";
    case BfgsStatus::kMaxIterations: return "max_iterations";
    case BfgsStatus::kLineSearchFailed: return "line_search_failed";
    case BfgsStatus::kNonFinite: return "non_finite";
  }
  return "?";
}

BfgsResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& options,
                         const std::optional<Eigen::MatrixXd>& inverse_hessian) {
  const Eigen::Index n = x0.size();
  BfgsResult r;
  r.x = x0;
  Eigen::VectorXd grad(n);
  r.value = f(r.x, grad);
  r.evaluations = 1;
  if (!std::isfinite(r.value) || !grad.allFinite()) {
    r.status = BfgsStatus::kNonFinite;
    return r;
  }

  const Eigen::MatrixXd h0 = inverse_hessian.value_or(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd h = h0;
  bool scale_pending = !inverse_hessian.has_value();
  bool just_reset = true;

  r.status = BfgsStatus::kMaxIterations;
  for (r.iterations = 0; r.iterations < options.max_iterations; ++r.iterations) {
    r.gradient_norm = grad.norm();
    if (r.gradient_norm <= options.gradient_tolerance * std::max(1.0, std::abs(r.value))) {
      r.status = BfgsStatus::kConverged;
      break;
    }

    Eigen::VectorXd p = -h * grad;
    double slope = grad.dot(p);
    if (!(slope < 0.0)) {
      h = h0;
      p = -h * grad;
      slope = grad.dot(p);
      just_reset = true;
    }

    Point origin{0.0, r.value, slope, grad};
    LineSearch search(f, r.x, p, origin, options, r.evaluations);
    // Cap the trial step at the size of the iterate; the search may still expand.
    const double p_norm = p.norm();
    const double x_norm = r.x.norm();
    const double alpha0 = (x_norm > 0.0 && p_norm > x_norm) ? x_norm / p_norm : 1.0;
    const auto step = search.run(alpha0);
    if (!step) {
      if (just_reset) {
        r.status = BfgsStatus::kLineSearchFailed;
        break;
      }
      h = h0;
      scale_pending = !inverse_hessian.has_value();
      just_reset = true;
      continue;
    }

    const Eigen::VectorXd s = step->alpha * p;
    const Eigen::VectorXd y = step->grad - grad;
    r.x += s;
    r.value = step->value;
    grad = step->grad;
    just_reset = false;

    const double sy = s.dot(y);
    if (sy > 1e-300 && sy > 1e-12 * s.norm() * y.norm()) {
      if (scale_pending) {
        h *= sy / y.squaredNorm();
        scale_pending = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h * y;
      // H+ = (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded.
      h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    }
  }
  r.gradient_norm = grad.norm();
  if (r.status == BfgsStatus::kMaxIterations &&
      r.gradient_norm <= options.gradient_tolerance * std::max(1.0, std::abs(r.value))) {
    r.status = BfgsStatus::kConverged;
  }
  return r;
}

}  // namespace binmwf
