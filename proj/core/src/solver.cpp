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

#include "binmwf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "binmwf/error.hpp"
#include "binmwf/format.hpp"

namespace binmwf {
namespace {

constexpr double kMinRcond = 1e-12;

// Inverse of the J_W Hessian plus the Gauss-Newton penalty term at `w`, in
// the real parameterization.
Eigen::MatrixXd inverse_hessian(const CostSpec& spec, const BinCoherence& phi, const Selector& q,
                                const FilterPair& w) {
  Eigen::MatrixXd h = j_w_hessian(phi.phi_yy);
  if (penalty_active(spec, phi.frequency) && spec.alpha > 0.0) {
    const Eigen::MatrixXd jac = penalty_jacobian(w, phi.phi_vv, q, spec.variant);
    h.noalias() += 2.0 * spec.alpha * jac.transpose() * jac;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > kMinRcond)) {
    const double load = kDiagonalLoading * h.trace() / static_cast<double>(h.rows());
    ldlt.compute(h + load * Eigen::MatrixXd::Identity(h.rows(), h.cols()));
  }
  return ldlt.solve(Eigen::MatrixXd::Identity(h.rows(), h.cols()));
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iterations < 1) throw InvalidInput("solver: max_iterations must be >= 1");
  if (!(gradient_tolerance > 0.0)) throw InvalidInput("solver: gradient_tolerance must be > 0");
}

BfgsOptions SolverConfig::bfgs_options() const {
  BfgsOptions o;
  o.max_iterations = max_iterations;
  o.gradient_tolerance = gradient_tolerance;
  return o;
}

FilterPair mwf_closed_form(const Eigen::MatrixXcd& phi_yy, const Eigen::MatrixXcd& phi_xx, const Selector& q,
                           bool* flagged) {
  const Eigen::Index m = phi_yy.rows();
  if (phi_xx.rows() != m || q.left.size() != m) throw InvalidInput("mwf_closed_form: dimension mismatch");
  if (flagged != nullptr) *flagged = false;

  Eigen::LLT<Eigen::MatrixXcd> llt(phi_yy);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
    const double load = kDiagonalLoading * phi_yy.trace().real() / static_cast<double>(m);
    llt.compute(phi_yy + load * Eigen::MatrixXcd::Identity(m, m));
    if (!(load > 0.0) || llt.info() != Eigen::Success) {
      if (flagged != nullptr) *flagged = true;
      return q.as_filters();
    }
  }
  FilterPair w;
  w.left = llt.solve(phi_xx * q.left.cast<Complex>());
  w.right = llt.solve(phi_xx * q.right.cast<Complex>());
  return w;
}

FilterBank mwf_closed_form(const CoherenceSet& phi, const Selector& q, std::vector<bool>* flagged) {
  FilterBank bank;
  bank.reserve(phi.bins());
  if (flagged != nullptr) flagged->assign(phi.bins(), false);
  for (std::size_t k = 0; k < phi.bins(); ++k) {
    bool f = false;
    bank.push_back(mwf_closed_form(phi.phi_yy[k], phi.phi_xx[k], q, &f));
    if (flagged != nullptr) (*flagged)[k] = f;
  }
  return bank;
}

BinSolution solve_bin(const CostSpec& spec, const BinCoherence& phi, const Selector& q, const SolverConfig& cfg,
                      const FilterPair* start) {
  spec.validate();
  cfg.validate();
  BinSolution out;
  const FilterPair closed = mwf_closed_form(phi.phi_yy, phi.phi_xx, q, &out.flagged);
  const FilterPair& init = start != nullptr ? *start : closed;

  const bool use_bfgs = start != nullptr || penalty_active(spec, phi.frequency);
  out.filters = init;
  out.initial_cost = combined(init, phi, q, spec).value;
  out.cost = out.initial_cost;
  if (!use_bfgs) return out;
  if (!std::isfinite(out.initial_cost)) {
    out.flagged = true;
    out.converged = false;
    return out;
  }

  const Eigen::Index m = phi.phi_yy.rows();
  Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    CostEval e = combined(unpack(x, m), phi, q, spec);
    grad = std::move(e.gradient);
    return e.value;
  };
  std::optional<Eigen::MatrixXd> h0;
  if (cfg.precondition) h0 = inverse_hessian(spec, phi, q, init);
  const BfgsResult r = minimize_bfgs(objective, pack(init), cfg.bfgs_options(), h0);

  out.iterations = r.iterations;
  if (r.status == BfgsStatus::kNonFinite || !std::isfinite(r.value)) {
    out.flagged = true;
    out.converged = false;
    return out;
  }
  out.converged = r.converged();
  if (r.value <= out.initial_cost) {
    out.filters = unpack(r.x, m);
    out.cost = r.value;
  }
  return out;
}

double SolveResult::unconverged_fraction() const {
  if (converged.empty()) return 0.0;
  const auto bad = std::count(converged.begin(), converged.end(), false);
  return static_cast<double>(bad) / static_cast<double>(converged.size());
}

SolveResult solve(const CostSpec& spec, const CoherenceSet& phi, const Selector& q, const StftConfig& stft,
                  const SolverConfig& cfg) {
  SolveResult res;
  const std::size_t bins = phi.bins();
  res.filters.resize(bins);
  res.cost.resize(bins);
  res.iterations.resize(bins);
  res.converged.resize(bins);
  res.flagged.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    BinSolution s = solve_bin(spec, BinCoherence::of(phi, k, stft), q, cfg);
    res.filters[k] = std::move(s.filters);
    res.cost[k] = s.cost;
    res.iterations[k] = s.iterations;
    res.converged[k] = s.converged;
    res.flagged[k] = s.flagged;
  }
  return res;
}

CalibrationResult calibrate_alpha(const CostSpec& base, const CoherenceSet& phi, const EvaluationScene& scene,
                                  Ear worst, const StftConfig& stft, const SolverConfig& cfg,
                                  const CalibrationOptions& options) {
  if (base.variant == Variant::kMwf) throw InvalidInput("calibrate_alpha: MWF has no weighting factor");
  if (!(options.loss_fraction >= 0.0 && options.loss_fraction < 1.0)) {
    throw InvalidInput("calibrate_alpha: loss_fraction must be in [0, 1)");
  }
  if (!(options.alpha_min > 0.0 && options.alpha_max > options.alpha_min) || options.points_per_decade < 1 ||
      options.refinements < 0) {
    throw InvalidInput("calibrate_alpha: invalid search grid");
  }

  CalibrationResult out;
  CostSpec spec = base;
  auto snr_at = [&](double alpha) {
    spec.alpha = alpha;
    return worst_ear_snr(solve(spec, phi, scene.q, stft, cfg).filters, scene, worst);
  };
  out.mwf_snr_db = worst_ear_snr(mwf_closed_form(phi, scene.q), scene, worst);
  out.snr_db = out.mwf_snr_db;
  if (options.loss_fraction == 0.0) return out;

  const double floor = (1.0 - options.loss_fraction) * out.mwf_snr_db;
  const double decades = std::log10(options.alpha_max / options.alpha_min);
  const int points = static_cast<int>(std::lround(decades * options.points_per_decade)) + 1;

  double lo = 0.0;
  double lo_snr = out.mwf_snr_db;
  double hi = 0.0;
  for (int i = 0; i < points; ++i) {
    const double alpha = options.alpha_min * std::pow(10.0, decades * i / (points - 1));
    const double snr = snr_at(alpha);
    if (snr >= floor) {
      lo = alpha;
      lo_snr = snr;
    } else {
      hi = alpha;
      break;
    }
  }

  if (hi == 0.0) {
    out.alpha = lo;
    out.snr_db = lo_snr;
    out.at_boundary = true;
    out.warning = "SNR constraint still satisfied at alpha_max; returning the grid boundary";
  } else {
    for (int r = 0; r < options.refinements; ++r) {
      const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
      const double snr = snr_at(mid);
      if (snr >= floor) {
        lo = mid;
        lo_snr = snr;
      } else {
        hi = mid;
      }
    }
    out.alpha = lo;
    out.snr_db = lo_snr;
  }
  out.achieved_loss = (out.mwf_snr_db - out.snr_db) / out.mwf_snr_db;
  return out;
}

std::vector<SweepRow> alpha_sweep(const CostSpec& spec, const CoherenceSet& phi, const EvaluationScene& scene,
                                  const std::vector<double>& alphas, const StftConfig& stft,
                                  const SolverConfig& cfg) {
  if (alphas.empty()) throw InvalidInput("alpha_sweep: empty alpha list");
  std::vector<SweepRow> rows;
  rows.reserve(alphas.size());
  for (double alpha : alphas) {
    CostSpec s = spec;
    s.alpha = alpha;
    s.validate();
    const SolveResult res = solve(s, phi, scene.q, stft, cfg);
    rows.push_back({alpha, evaluate(res.filters, scene), res.unconverged_fraction()});
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "alpha,snr_l_db,snr_r_db,disnr_l_db,disnr_r_db,ditd_s,ditd_n,dmsc_s,dmsc_n\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << format_double(r.alpha) << ',' << format_double(m.snr_l) << ',' << format_double(m.snr_r) << ','
        << format_double(m.disnr_l) << ',' << format_double(m.disnr_r) << ',' << format_double(m.ditd_s) << ','
        << format_double(m.ditd_n) << ',' << format_double(m.dmsc_s) << ',' << format_double(m.dmsc_n) << '\n';
  }
}

}  // namespace binmwf
