#include "gradobs/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gradobs/kernels.hpp"

namespace gradobs {

ModeSplit split_unstable(const ModalBasis& basis, double threshold) {
  ModeSplit split;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (basis.eigenvalue_of(k) >= threshold) {
      split.unstable.push_back(k);
    } else {
      split.stable.push_back(k);
    }
  }
  return split;
}

namespace {

Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double tol_rel = 1e-12) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = tol_rel * (s.size() > 0 ? s[0] : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff) inv[i] = 1.0 / s[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

std::string failure_message(const std::vector<DetectabilityFailure>& failing,
                            double margin) {
  std::string msg = "not detectable on the target at margin " +
                    std::to_string(margin) + ": ";
  for (std::size_t i = 0; i < failing.size(); ++i) {
    if (i > 0) msg += ", ";
    msg += "group " + std::to_string(failing[i].group_index) + " (eigenvalue " +
           std::to_string(failing[i].eigenvalue) + ", multiplicity " +
           std::to_string(failing[i].multiplicity) + ", rank " +
           std::to_string(failing[i].rank) + ")";
  }
  return msg;
}

}  // namespace

GainDesign design_gain(const OutputMap& output_map, const ModalBasis& basis,
                       const std::vector<EigenvalueGroup>& groups, double margin,
                       const GainDesignOptions& options) {
  if (!(margin > 0.0)) throw std::invalid_argument("design_gain: margin must be positive");
  if (!output_map.basis->same_as(basis)) {
    throw std::invalid_argument("design_gain: output map basis mismatch");
  }
  const Eigen::Index n_modes = static_cast<Eigen::Index>(basis.size());
  const Eigen::MatrixXd& c = output_map.entries;
  const int q = output_map.outputs();

  // Slow set: every mode with eigenvalue >= -margin must appear in a group.
  std::set<std::size_t> grouped;
  for (const EigenvalueGroup& g : groups) {
    grouped.insert(g.members.begin(), g.members.end());
  }
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (basis.eigenvalue_of(k) >= -margin && !grouped.count(k)) {
      throw std::invalid_argument("design_gain: groups do not cover the slow spectrum");
    }
  }

  std::vector<std::size_t> slow_groups;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    if (groups[gi].eigenvalue >= -margin) slow_groups.push_back(gi);
  }

  GainDesign design;
  std::vector<std::size_t> visible_groups;
  std::vector<std::size_t> exempt_modes;
  for (std::size_t gi : slow_groups) {
    bool exempt = false;
    if (options.target) {
      exempt = std::all_of(groups[gi].members.begin(), groups[gi].members.end(),
                           [&](std::size_t k) {
                             return options.target->mode_is_trace_null(
                                 k, options.trace_null_tol);
                           });
    }
    if (exempt) {
      design.exempt_groups.push_back(static_cast<int>(gi) + 1);
      exempt_modes.insert(exempt_modes.end(), groups[gi].members.begin(),
                          groups[gi].members.end());
    } else {
      visible_groups.push_back(gi);
    }
  }

  // Rank precondition on every visible slow group, with a shared singular
  // value reference across them.
  std::vector<Eigen::MatrixXd> blocks;
  double sigma_ref = 0.0;
  for (std::size_t gi : visible_groups) {
    const EigenvalueGroup& g = groups[gi];
    Eigen::MatrixXd block(q, g.multiplicity());
    for (int j = 0; j < g.multiplicity(); ++j) {
      block.col(j) = c.col(static_cast<Eigen::Index>(g.members[j]));
    }
    blocks.push_back(std::move(block));
    if (q > 0 && g.multiplicity() > 0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(blocks.back());
      sigma_ref = std::max(sigma_ref, svd.singularValues().maxCoeff());
    }
  }
  std::vector<DetectabilityFailure> failing;
  for (std::size_t bi = 0; bi < visible_groups.size(); ++bi) {
    const EigenvalueGroup& g = groups[visible_groups[bi]];
    int rank = 0;
    if (q > 0 && sigma_ref > 0.0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(blocks[bi]);
      const double threshold = options.rank_tol * sigma_ref;
      rank = static_cast<int>((svd.singularValues().array() >= threshold).count());
    }
    if (rank < g.multiplicity() || g.multiplicity() > q) {
      failing.push_back({static_cast<int>(visible_groups[bi]) + 1, g.eigenvalue,
                         g.multiplicity(), rank});
    }
  }
  if (!failing.empty()) {
    throw DetectabilityError(failure_message(failing, margin), std::move(failing));
  }

  // Visible slow modes with their pole shifts, in group order.
  std::vector<std::size_t> s_modes;
  std::vector<double> shifts;
  for (std::size_t gi : visible_groups) {
    const double shift = groups[gi].eigenvalue + margin;
    for (std::size_t k : groups[gi].members) {
      s_modes.push_back(k);
      shifts.push_back(shift);
    }
  }

  // Exempt modes whose sensor columns are live must be annihilated by the
  // designed rows, so they join the pseudo-inverse column set.
  const double col_scale = c.size() > 0 ? c.cwiseAbs().maxCoeff() : 0.0;
  std::vector<std::size_t> live_exempt;
  for (std::size_t k : exempt_modes) {
    if (c.col(static_cast<Eigen::Index>(k)).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, col_scale)) {
      live_exempt.push_back(k);
    }
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_modes, q);
  const std::size_t ns = s_modes.size();
  if (ns > 0) {
    bool joint_done = false;
    if (visible_groups.size() > 1 || !live_exempt.empty()) {
      const std::size_t ne = live_exempt.size();
      if (q >= static_cast<int>(ns + ne)) {
        Eigen::MatrixXd c_se(q, ns + ne);
        for (std::size_t j = 0; j < ns; ++j) {
          c_se.col(j) = c.col(static_cast<Eigen::Index>(s_modes[j]));
        }
        for (std::size_t j = 0; j < ne; ++j) {
          c_se.col(ns + j) = c.col(static_cast<Eigen::Index>(live_exempt[j]));
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(c_se);
        const Eigen::VectorXd& sv = svd.singularValues();
        if (sv.minCoeff() > options.rank_tol * sv.maxCoeff()) {
          Eigen::MatrixXd x = pinv(c_se).topRows(static_cast<Eigen::Index>(ns));
          for (std::size_t j = 0; j < ns; ++j) {
            h.row(static_cast<Eigen::Index>(s_modes[j])) = shifts[j] * x.row(j);
          }
          joint_done = true;
        }
      }
    }
    if (!joint_done) {
      // Group-wise pseudo-inverse output injection.
      std::size_t at = 0;
      for (std::size_t bi = 0; bi < visible_groups.size(); ++bi) {
        const EigenvalueGroup& g = groups[visible_groups[bi]];
        Eigen::MatrixXd hg = (g.eigenvalue + margin) * pinv(blocks[bi]);
        for (int j = 0; j < g.multiplicity(); ++j) {
          h.row(static_cast<Eigen::Index>(g.members[j])) = hg.row(j);
        }
        at += g.members.size();
      }
      (void)at;
    }
  }

  // Verification: exempt rows carry no gain by construction; the designed
  // rows must not see exempt errors through the sensors, and the non-exempt
  // closed loop must meet the margin.
  if (!exempt_modes.empty() && ns > 0) {
    Eigen::MatrixXd coupling(ns, exempt_modes.size());
    for (std::size_t j = 0; j < exempt_modes.size(); ++j) {
      Eigen::VectorXd hc = h * c.col(static_cast<Eigen::Index>(exempt_modes[j]));
      for (std::size_t i = 0; i < ns; ++i) {
        coupling(i, j) = hc[static_cast<Eigen::Index>(s_modes[i])];
      }
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff() * col_scale);
    if (coupling.cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw std::runtime_error(
          "design_gain: exempt modes couple into the designed rows through the "
          "sensors; the target-region margin cannot be certified");
    }
  }

  std::vector<std::size_t> visible_modes;
  {
    std::set<std::size_t> exempt_set(exempt_modes.begin(), exempt_modes.end());
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (!exempt_set.count(k)) visible_modes.push_back(k);
    }
  }
  Eigen::MatrixXd closed = (-h * c);
  closed.diagonal() += basis.eigenvalues();
  Eigen::MatrixXd closed_vv(visible_modes.size(), visible_modes.size());
  for (std::size_t i = 0; i < visible_modes.size(); ++i) {
    for (std::size_t j = 0; j < visible_modes.size(); ++j) {
      closed_vv(i, j) = closed(static_cast<Eigen::Index>(visible_modes[i]),
                               static_cast<Eigen::Index>(visible_modes[j]));
    }
  }
  double max_real = -std::numeric_limits<double>::infinity();
  if (closed_vv.rows() > 0) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(closed_vv, /*computeEigenvectors=*/false);
    max_real = es.eigenvalues().real().maxCoeff();
  }
  if (max_real > -margin + options.spectrum_tol) {
    throw std::runtime_error(
        "design_gain: closed-loop spectrum misses the margin (max real part " +
        std::to_string(max_real) + ")");
  }

  design.gain.entries = std::move(h);
  design.closed_loop_max_real = max_real;
  return design;
}

DetectabilityReport detectability_check(const OutputMap& output_map,
                                        const ModalBasis& basis, double margin,
                                        double grouping_tol, double rank_tol) {
  if (margin < 0.0) throw std::invalid_argument("detectability_check: margin must be >= 0");
  std::vector<EigenvalueGroup> all = group_all_eigenvalues(basis, grouping_tol);
  std::vector<EigenvalueGroup> slow;
  for (const EigenvalueGroup& g : all) {
    if (g.eigenvalue >= -margin) slow.push_back(g);
  }
  DetectabilityReport report;
  report.slow_groups = static_cast<int>(slow.size());
  if (slow.empty()) {
    report.detectable = true;  // vacuously: nothing to stabilize
    return report;
  }
  if (output_map.outputs() == 0) {
    for (std::size_t gi = 0; gi < slow.size(); ++gi) {
      report.failing.push_back({static_cast<int>(gi) + 1, slow[gi].eigenvalue,
                                slow[gi].multiplicity(), 0});
    }
    report.detectable = false;
    return report;
  }
  StrategicReport rank_report = strategic_rank_test(output_map, slow, rank_tol);
  for (const GroupReport& g : rank_report.groups) {
    if (!g.full_rank) {
      report.failing.push_back({g.index, g.eigenvalue, g.multiplicity, g.rank});
    }
  }
  report.detectable = report.failing.empty() && rank_report.precondition_ok;
  return report;
}

EstimatorCombiner::EstimatorCombiner(Eigen::MatrixXd m, Eigen::MatrixXd n,
                                     const OutputMap& output_map, double tol)
    : m_(std::move(m)), n_(std::move(n)), basis_(output_map.basis) {
  const Eigen::Index modes = static_cast<Eigen::Index>(basis_->size());
  if (m_.rows() != modes || m_.cols() != output_map.outputs() ||
      n_.rows() != modes || n_.cols() != modes) {
    throw std::invalid_argument("EstimatorCombiner: dimension mismatch");
  }
  Eigen::MatrixXd residual = m_ * output_map.entries + n_ -
                             Eigen::MatrixXd::Identity(modes, modes);
  if (residual.cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("EstimatorCombiner: M C + N != I on the truncation");
  }
}

ModalField EstimatorCombiner::output(const Eigen::VectorXd& y,
                                     const ModalField& z) const {
  if (y.size() != m_.cols()) throw std::invalid_argument("EstimatorCombiner: bad output size");
  if (!z.basis()->same_as(*basis_)) {
    throw std::invalid_argument("EstimatorCombiner: basis mismatch");
  }
  return ModalField(z.basis(), m_ * y + n_ * z.coeffs());
}

TrajectoryRecord simulate_coupled(const SystemSpec& sys, const OutputMap& output_map,
                                  const GainMap& gain, const ModalField& z0,
                                  const BoundaryTraceOperator& target,
                                  const SimulationGrid& grid) {
  const BasisPtr& basis = sys.basis;
  const Eigen::Index n_modes = static_cast<Eigen::Index>(basis->size());
  if (!output_map.basis->same_as(*basis) || !z0.basis()->same_as(*basis) ||
      !target.basis()->same_as(*basis) || !sys.x0.basis()->same_as(*basis)) {
    throw std::invalid_argument("simulate_coupled: basis mismatch");
  }
  if (gain.entries.rows() != n_modes || gain.entries.cols() != output_map.outputs()) {
    throw std::invalid_argument("simulate_coupled: gain dimensions mismatch");
  }
  if (!(grid.dt_out > 0.0) || !(grid.t_end >= 0.0) || !std::isfinite(grid.t_end)) {
    throw std::invalid_argument("simulate_coupled: need finite t_end >= 0 and dt_out > 0");
  }
  const bool with_input = sys.input_map.cols() > 0 && sys.control != nullptr;
  if (with_input && sys.input_map.rows() != n_modes) {
    throw std::invalid_argument("simulate_coupled: input map rows != mode count");
  }

  const int steps = static_cast<int>(std::llround(grid.t_end / grid.dt_out));
  const double dt = grid.dt_out;
  const Eigen::VectorXd& lam = basis->eigenvalues();

  TrajectoryRecord rec;
  rec.times.resize(steps + 1);
  for (int k = 0; k <= steps; ++k) rec.times[k] = k * dt;

  // State: exact per-mode exponentials; the input convolution is added with
  // an 8-node Gauss-Legendre rule per output step.
  rec.state_coeffs.resize(n_modes, steps + 1);
  if (!with_input) {
    for (int k = 0; k <= steps; ++k) {
      kernels::exp_scale(rec.state_coeffs.col(k).data(), sys.x0.coeffs().data(),
                         lam.data(), rec.times[k], static_cast<std::size_t>(n_modes));
    }
  } else {
    Eigen::VectorXd x = sys.x0.coeffs();
    rec.state_coeffs.col(0) = x;
    const GaussLegendre& gl = gauss_legendre(8);
    Eigen::VectorXd scaled(n_modes);
    for (int k = 0; k < steps; ++k) {
      Eigen::VectorXd next(n_modes);
      kernels::exp_scale(next.data(), x.data(), lam.data(), dt,
                         static_cast<std::size_t>(n_modes));
      for (Eigen::Index j = 0; j < gl.nodes.size(); ++j) {
        const double s = 0.5 * dt * (gl.nodes[j] + 1.0);
        const double w = 0.5 * dt * gl.weights[j];
        Eigen::VectorXd bu = sys.input_map * sys.control(rec.times[k] + s);
        kernels::exp_scale(scaled.data(), bu.data(), lam.data(), dt - s,
                           static_cast<std::size_t>(n_modes));
        next += w * scaled;
      }
      x = next;
      rec.state_coeffs.col(k + 1) = x;
    }
  }

  // Error: e(t) = exp((Lambda - H C) t) e0.
  Eigen::VectorXd e0 = z0.coeffs() - sys.x0.coeffs();
  const bool zero_gain = gain.entries.size() == 0 || gain.entries.isZero(0.0);
  if (zero_gain) {
    rec.error_coeffs.resize(n_modes, steps + 1);
    for (int k = 0; k <= steps; ++k) {
      kernels::exp_scale(rec.error_coeffs.col(k).data(), e0.data(), lam.data(),
                         rec.times[k], static_cast<std::size_t>(n_modes));
    }
  } else {
    Eigen::MatrixXd closed = -gain.entries * output_map.entries;
    closed.diagonal() += lam;
    ErrorPropagator prop(std::move(closed));
    rec.error_coeffs = prop.propagate_grid(e0, dt, steps);
  }

  rec.observer_coeffs = rec.state_coeffs + rec.error_coeffs;
  rec.gamma_error_norm.resize(steps + 1);
  rec.omega_error_norm.resize(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    ModalField err(basis, rec.error_coeffs.col(k));
    rec.omega_error_norm[k] = err.h1_norm();
    rec.gamma_error_norm[k] = trace_norm(target.apply(err));
  }
  return rec;
}

DecayFit fit_decay(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                   double tail_fraction) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("fit_decay: series length mismatch");
  }
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("fit_decay: tail fraction must lie in (0, 1]");
  }
  const Eigen::Index n = times.size();
  const Eigen::Index start =
      static_cast<Eigen::Index>(std::floor(n * (1.0 - tail_fraction)));
  if (n - start < 8) throw std::invalid_argument("fit_decay: need at least 8 tail samples");

  std::vector<double> ts, logs;
  for (Eigen::Index i = start; i < n; ++i) {
    const double v = values[i];
    if (v < 0.0) throw std::invalid_argument("fit_decay: values must be nonnegative");
    if (v > 1e-14) {
      ts.push_back(times[i]);
      logs.push_back(std::log(v));
    }
  }

  DecayFit fit;
  fit.samples_used = static_cast<int>(ts.size());
  if (ts.size() < 2) {
    fit.converged = true;
    fit.rate = std::numeric_limits<double>::infinity();
    return fit;
  }

  const double count = static_cast<double>(ts.size());
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sl += logs[i];
    stt += ts[i] * ts[i];
    stl += ts[i] * logs[i];
  }
  const double denom = count * stt - st * st;
  const double slope = denom != 0.0 ? (count * stl - st * sl) / denom : 0.0;
  const double intercept = (sl - slope * st) / count;
  fit.rate = -slope;
  fit.amplitude = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = logs[i] - (intercept + slope * ts[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / count);
  return fit;
}

}  // namespace gradobs
