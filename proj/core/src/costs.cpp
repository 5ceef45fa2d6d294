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

#include "binmwf/costs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "binmwf/error.hpp"

namespace binmwf {
namespace {

constexpr double kGuard = 1e-12;
const Complex kJ{0.0, 1.0};

void check_dims(const FilterPair& w, Eigen::Index m) {
  if (w.left.size() != m || w.right.size() != m) {
    throw InvalidInput("cost: filter dimension " + std::to_string(w.left.size()) + "/" +
                       std::to_string(w.right.size()) + " does not match " + std::to_string(m) +
                       " channels");
  }
}

// Writes 2*dF/dw* of both ears into the real gradient layout.
Eigen::VectorXd real_gradient(const Eigen::VectorXcd& g_left, const Eigen::VectorXcd& g_right) {
  const Eigen::Index m = g_left.size();
  Eigen::VectorXd g(4 * m);
  g.segment(0, m) = g_left.real();
  g.segment(m, m) = g_left.imag();
  g.segment(2 * m, m) = g_right.real();
  g.segment(3 * m, m) = g_right.imag();
  return g;
}

CostEval degenerate(Eigen::Index m) {
  return {kDegeneratePenalty, Eigen::VectorXd::Zero(4 * m), true};
}

// Quantities shared by the two penalties.
struct OutputTerms {
  Eigen::VectorXcd phi_wl;  // phi w_L
  Eigen::VectorXcd phi_wr;  // phi w_R
  Complex cross;            // w_L^H phi w_R
  double p_left = 0.0;
  double p_right = 0.0;
  double eps = 0.0;
};

OutputTerms output_terms(const FilterPair& w, const Eigen::MatrixXcd& phi) {
  OutputTerms t;
  t.phi_wl = phi * w.left;
  t.phi_wr = phi * w.right;
  t.cross = w.left.dot(t.phi_wr);
  t.p_left = w.left.dot(t.phi_wl).real();
  t.p_right = w.right.dot(t.phi_wr).real();
  t.eps = kGuard * std::abs(phi.trace().real());
  return t;
}

// Penalty residual r and its real Jacobian (one row per real component of r);
// the penalty is |r|^2 with gradient 2 J^T r.
struct Residual {
  Eigen::VectorXd value;
  Eigen::MatrixXd jacobian;
  bool singular = false;
};

Residual ipd_residual(const FilterPair& w, const Eigen::MatrixXcd& phi_vv, const Selector& q) {
  const Eigen::Index m = phi_vv.rows();
  check_dims(w, m);
  const auto t = output_terms(w, phi_vv);
  Residual r;
  if (t.p_left <= t.eps || t.p_right <= t.eps || std::abs(t.cross) <= t.eps) {
    r.singular = true;
    return r;
  }
  const double ipd_in = std::arg(phi_vv(q.left_index, q.right_index));
  r.value = Eigen::VectorXd::Constant(1, wrap_angle(std::arg(t.cross) - ipd_in));
  // d(arg c): 2 d/dw_L* = -j phi w_R / c, 2 d/dw_R* = j phi w_L / c*.
  const Eigen::VectorXcd d_left = -kJ * t.phi_wr / t.cross;
  const Eigen::VectorXcd d_right = kJ * t.phi_wl / std::conj(t.cross);
  r.jacobian = real_gradient(d_left, d_right).transpose();
  return r;
}

Residual ic_residual(const FilterPair& w, const Eigen::MatrixXcd& phi_vv, const Selector& q) {
  const Eigen::Index m = phi_vv.rows();
  check_dims(w, m);
  const auto t = output_terms(w, phi_vv);
  Residual r;
  if (t.p_left <= t.eps || t.p_right <= t.eps) {
    r.singular = true;
    return r;
  }
  const double in_left = phi_vv(q.left_index, q.left_index).real();
  const double in_right = phi_vv(q.right_index, q.right_index).real();
  const double in_eps = kGuard * std::abs(phi_vv.trace().real());
  const Complex ic_in = (in_left > in_eps && in_right > in_eps)
                            ? phi_vv(q.left_index, q.right_index) / std::sqrt(in_left * in_right)
                            : Complex{};

  const double norm = std::sqrt(t.p_left * t.p_right);
  const Complex ic = t.cross / norm;
  const Complex d = ic - ic_in;

  // Wirtinger derivatives of ic and conj(ic) with respect to w_L* and w_R*.
  const Eigen::VectorXcd dic_left = t.phi_wr / norm - 0.5 * ic * t.phi_wl / t.p_left;
  const Eigen::VectorXcd dicc_left = -0.5 * std::conj(ic) * t.phi_wl / t.p_left;
  const Eigen::VectorXcd dic_right = -0.5 * ic * t.phi_wr / t.p_right;
  const Eigen::VectorXcd dicc_right = t.phi_wl / norm - 0.5 * std::conj(ic) * t.phi_wr / t.p_right;

  r.value.resize(2);
  r.value << d.real(), d.imag();
  r.jacobian.resize(2, 4 * m);
  r.jacobian.row(0) = real_gradient(dic_left + dicc_left, dic_right + dicc_right).transpose();
  r.jacobian.row(1) = real_gradient(-kJ * (dic_left - dicc_left), -kJ * (dic_right - dicc_right)).transpose();
  return r;
}

CostEval squared(const Residual& r, Eigen::Index m) {
  if (r.singular) return degenerate(m);
  return {r.value.squaredNorm(), 2.0 * r.jacobian.transpose() * r.value, false};
}

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kMwf: return "MWF";
    case Variant::kMwfItd: return "MWF-ITD";
    case Variant::kMwfIc: return "MWF-IC";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "MWF") return Variant::kMwf;
  if (upper == "MWF-ITD") return Variant::kMwfItd;
  if (upper == "MWF-IC") return Variant::kMwfIc;
  throw InvalidInput("unknown variant '" + std::string(name) + "' (expected MWF, MWF-ITD or MWF-IC)");
}

void CostSpec::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("cost: alpha must be finite and >= 0");
  if (!(cue_cutoff > 0.0)) throw InvalidInput("cost: cue_cutoff must be > 0");
}

Eigen::VectorXd pack(const FilterPair& w) {
  return real_gradient(w.left, w.right);
}

FilterPair unpack(const Eigen::VectorXd& params, Eigen::Index channels) {
  if (params.size() != 4 * channels) throw InvalidInput("unpack: parameter length mismatch");
  FilterPair w;
  w.left = params.segment(0, channels).cast<Complex>() + kJ * params.segment(channels, channels).cast<Complex>();
  w.right = params.segment(2 * channels, channels).cast<Complex>() +
            kJ * params.segment(3 * channels, channels).cast<Complex>();
  return w;
}

CostEval j_w(const FilterPair& w, const BinCoherence& phi, const Selector& q) {
  const Eigen::Index m = phi.phi_yy.rows();
  check_dims(w, m);
  if (phi.phi_xx.rows() != m || q.left.size() != m) throw InvalidInput("j_w: dimension mismatch");

  const Eigen::VectorXcd xq_left = phi.phi_xx * q.left.cast<Complex>();
  const Eigen::VectorXcd xq_right = phi.phi_xx * q.right.cast<Complex>();
  const Eigen::VectorXcd yw_left = phi.phi_yy * w.left;
  const Eigen::VectorXcd yw_right = phi.phi_yy * w.right;

  double value = phi.phi_xx(q.left_index, q.left_index).real() + phi.phi_xx(q.right_index, q.right_index).real();
  value += -2.0 * w.left.dot(xq_left).real() + w.left.dot(yw_left).real();
  value += -2.0 * w.right.dot(xq_right).real() + w.right.dot(yw_right).real();

  return {value, real_gradient(2.0 * (yw_left - xq_left), 2.0 * (yw_right - xq_right)), false};
}

CostEval j_ipd(const FilterPair& w, const Eigen::MatrixXcd& phi_vv, const Selector& q) {
  return squared(ipd_residual(w, phi_vv, q), phi_vv.rows());
}

CostEval j_ic(const FilterPair& w, const Eigen::MatrixXcd& phi_vv, const Selector& q) {
  return squared(ic_residual(w, phi_vv, q), phi_vv.rows());
}

Eigen::MatrixXd penalty_jacobian(const FilterPair& w, const Eigen::MatrixXcd& phi_vv, const Selector& q,
                                 Variant variant) {
  if (variant == Variant::kMwf) return Eigen::MatrixXd(0, 4 * phi_vv.rows());
  Residual r = variant == Variant::kMwfItd ? ipd_residual(w, phi_vv, q) : ic_residual(w, phi_vv, q);
  if (r.singular) return Eigen::MatrixXd(0, 4 * phi_vv.rows());
  return std::move(r.jacobian);
}

bool penalty_active(const CostSpec& spec, double frequency) {
  return spec.variant != Variant::kMwf && frequency > 0.0 && frequency <= spec.cue_cutoff;
}

CostEval combined(const FilterPair& w, const BinCoherence& phi, const Selector& q, const CostSpec& spec) {
  CostEval out = j_w(w, phi, q);
  if (!penalty_active(spec, phi.frequency) || spec.alpha == 0.0) return out;
  const CostEval pen = spec.variant == Variant::kMwfItd ? j_ipd(w, phi.phi_vv, q) : j_ic(w, phi.phi_vv, q);
  out.value += spec.alpha * pen.value;
  out.gradient += spec.alpha * pen.gradient;
  out.singular = pen.singular;
  return out;
}

Eigen::MatrixXd j_w_hessian(const Eigen::MatrixXcd& phi_yy) {
  const Eigen::Index m = phi_yy.rows();
  const Eigen::MatrixXd re = phi_yy.real();
  const Eigen::MatrixXd im = phi_yy.imag();
  Eigen::MatrixXd block(2 * m, 2 * m);
  block << re, -im, im, re;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(4 * m, 4 * m);
  h.topLeftCorner(2 * m, 2 * m) = 2.0 * block;
  h.bottomRightCorner(2 * m, 2 * m) = 2.0 * block;
  return h;
}

}  // namespace binmwf
