#include "nbflab/fv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nbflab {

namespace {

inline double minmod(double a, double b) {
  if (a > 0.0 && b > 0.0) return std::min(a, b);
  if (a < 0.0 && b < 0.0) return std::max(a, b);
  return 0.0;
}

inline double nd_pressure(const Eigen::Vector4d& w, double gamma) {
  return (gamma - 1.0) * (w[3] - 0.5 * w[0] * (w[1] * w[1] + w[2] * w[2]));
}

// (rho, u, v, P) face-state validity
inline bool physical(const Eigen::Vector4d& q) {
  return q[0] > 0.0 && q[3] > 0.0;
}

// Rusanov flux on (rho, u, v, P) face states; hot path of the solver.
inline Eigen::Vector4d rusanov_raw_p(const Eigen::Vector4d& qL,
                                     const Eigen::Vector4d& qR,
                                     const Eigen::Vector2d& n, double gamma) {
  const double pL = qL[3];
  const double pR = qR[3];
  if (qL[0] <= 0.0 || pL <= 0.0 || qR[0] <= 0.0 || pR <= 0.0)
    throw NumericalError("rusanov_flux: non-positive density or pressure");

  const double eL = pL / (gamma - 1.0) + 0.5 * qL[0] * (qL[1] * qL[1] + qL[2] * qL[2]);
  const double eR = pR / (gamma - 1.0) + 0.5 * qR[0] * (qR[1] * qR[1] + qR[2] * qR[2]);
  const double unL = qL[1] * n.x() + qL[2] * n.y();
  const double unR = qR[1] * n.x() + qR[2] * n.y();
  const double aL = std::sqrt(gamma * pL / qL[0]);
  const double aR = std::sqrt(gamma * pR / qR[0]);
  const double smax = std::max(std::abs(unL) + aL, std::abs(unR) + aR);

  Eigen::Vector4d fL, fR;
  fL << qL[0] * unL, qL[0] * qL[1] * unL + pL * n.x(),
      qL[0] * qL[2] * unL + pL * n.y(), (eL + pL) * unL;
  fR << qR[0] * unR, qR[0] * qR[1] * unR + pR * n.x(),
      qR[0] * qR[2] * unR + pR * n.y(), (eR + pR) * unR;

  Eigen::Vector4d uL, uR;
  uL << qL[0], qL[0] * qL[1], qL[0] * qL[2], eL;
  uR << qR[0], qR[0] * qR[1], qR[0] * qR[2], eR;

  return 0.5 * (fL + fR) - 0.5 * smax * (uR - uL);
}

inline Eigen::Vector4d mirror_velocity(const Eigen::Vector4d& w,
                                       const Eigen::Vector2d& n) {
  const double un = w[1] * n.x() + w[2] * n.y();
  Eigen::Vector4d g = w;
  g[1] -= 2.0 * un * n.x();
  g[2] -= 2.0 * un * n.y();
  return g;
}

}  // namespace

Eigen::Vector4d rusanov_flux(const PrimitiveState& wL, const PrimitiveState& wR,
                             const Eigen::Vector2d& n, const GasConstants& gas) {
  Eigen::Vector4d qL, qR;
  qL << wL.rho, wL.u, wL.v, pressure(wL, gas);
  qR << wR.rho, wR.u, wR.v, pressure(wR, gas);
  return rusanov_raw_p(qL, qR, n, gas.gamma);
}

Eigen::VectorXd minmod_slopes(const Eigen::Ref<const Eigen::VectorXd>& padded,
                              double slope_scale) {
  const Eigen::Index m = padded.size() - 2;
  if (m < 3)
    throw ArgumentError("minmod_slopes: need at least 3 cells in the line");
  Eigen::VectorXd slopes(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const double back = padded[c + 1] - padded[c];
    const double fwd = padded[c + 2] - padded[c + 1];
    slopes[c] = slope_scale * minmod(back, fwd);
  }
  return slopes;
}

ReconstructedLine minmod_reconstruct(
    const Eigen::Ref<const Eigen::VectorXd>& padded, double slope_scale) {
  const Eigen::Index m = padded.size() - 2;
  const Eigen::VectorXd slopes = minmod_slopes(padded, slope_scale);
  ReconstructedLine line;
  line.left.resize(m + 1);
  line.right.resize(m + 1);
  for (Eigen::Index f = 0; f <= m; ++f) {
    line.left[f] = f == 0 ? padded[0] : padded[f] + 0.5 * slopes[f - 1];
    line.right[f] = f == m ? padded[m + 1] : padded[f + 1] - 0.5 * slopes[f];
  }
  return line;
}

double cfl_schedule(int iter, const SolverConfig& cfg) {
  if (iter >= cfg.cfl_ramp_iters) return cfg.cfl_end;
  const double t = static_cast<double>(iter) / cfg.cfl_ramp_iters;
  return cfg.cfl_start + (cfg.cfl_end - cfg.cfl_start) * t;
}

double blend_schedule(int iter, const SolverConfig& cfg) {
  if (iter <= cfg.first_order_until) return 0.0;
  if (iter >= cfg.blend_until) return 1.0;
  return static_cast<double>(iter - cfg.first_order_until) /
         (cfg.blend_until - cfg.first_order_until);
}

double residual_metric(const Eigen::Ref<const FieldMatrix>& cell_residuals,
                       const Eigen::Ref<const Eigen::VectorXd>& volumes) {
  if (cell_residuals.rows() == 0)
    throw ArgumentError("residual_metric: empty residuals");
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < cell_residuals.rows(); ++c)
      acc += std::abs(cell_residuals(c, k)) / volumes[c];
    total += acc / static_cast<double>(cell_residuals.rows());
  }
  return total / 4.0;
}

EulerFvSolver::EulerFvSolver(const StructuredGrid& grid,
                             const SolverConfig& cfg, double mach,
                             GasConstants gas, FreestreamRef ref)
    : grid_(grid),
      cfg_(cfg),
      mach_(mach),
      gas_(gas),
      scales_(NondimScales::freestream_velocity(mach, gas, ref)) {
  const PrimitiveState inf = freestream_state(mach, gas, ref);
  freestream_nd_ = scales_.to_nondim(inf.vec());
  freestream_ndp_ = freestream_nd_;
  freestream_ndp_[3] = nd_pressure(freestream_nd_, gas.gamma);

  const int n = grid_.n_cells();
  conserved_.resize(n, 4);
  primitive_.resize(n, 4);
  slope_r_.resize(n, 4);
  slope_t_.resize(n, 4);
  divergence_.resize(n, 4);

  min_spacing_.resize(n);
  for (int j = 0; j < grid_.ntheta; ++j) {
    for (int i = 0; i < grid_.nr; ++i) {
      const Eigen::Vector2d rlo = grid_.r_faces[grid_.r_face(i, j)].centroid;
      const Eigen::Vector2d rhi = grid_.r_faces[grid_.r_face(i + 1, j)].centroid;
      const Eigen::Vector2d tlo = grid_.t_faces[grid_.t_face(i, j)].centroid;
      const Eigen::Vector2d thi = grid_.t_faces[grid_.t_face(i, j + 1)].centroid;
      min_spacing_[grid_.cell(i, j)] =
          std::min((rhi - rlo).norm(), (thi - tlo).norm());
    }
  }
  set_freestream_field();
}

void EulerFvSolver::set_field(const Eigen::Ref<const FieldMatrix>& w_physical) {
  if (w_physical.rows() != grid_.n_cells())
    throw ArgumentError("set_field: cell count mismatch");
  for (Eigen::Index c = 0; c < w_physical.rows(); ++c) {
    const Eigen::Vector4d w =
        scales_.to_nondim(w_physical.row(c).transpose());
    conserved_(c, 0) = w[0];
    conserved_(c, 1) = w[0] * w[1];
    conserved_(c, 2) = w[0] * w[2];
    conserved_(c, 3) = w[3];
  }
  iter_ = 0;
  history_.clear();
}

void EulerFvSolver::set_freestream_field() {
  FieldMatrix w(grid_.n_cells(), 4);
  const PrimitiveState inf =
      PrimitiveState::from_vec(scales_.to_physical(freestream_nd_));
  for (Eigen::Index c = 0; c < w.rows(); ++c)
    w.row(c) << inf.rho, inf.u, inf.v, inf.E;
  set_field(w);
}

FieldMatrix EulerFvSolver::field() const {
  FieldMatrix w(grid_.n_cells(), 4);
  for (Eigen::Index c = 0; c < w.rows(); ++c) {
    Eigen::Vector4d prim;
    prim << conserved_(c, 0), conserved_(c, 1) / conserved_(c, 0),
        conserved_(c, 2) / conserved_(c, 0), conserved_(c, 3);
    w.row(c) = scales_.to_physical(prim).transpose();
  }
  return w;
}

double EulerFvSolver::assemble_residual(FieldMatrix& divergence) {
  const int nr = grid_.nr;
  const int nt = grid_.ntheta;
  const double gamma = gas_.gamma;
  const double beta = blend_schedule(iter_, cfg_);

  for (Eigen::Index c = 0; c < conserved_.rows(); ++c) {
    const double rho = conserved_(c, 0);
    const double u = conserved_(c, 1) / rho;
    const double v = conserved_(c, 2) / rho;
    primitive_(c, 0) = rho;
    primitive_(c, 1) = u;
    primitive_(c, 2) = v;
    primitive_(c, 3) =
        (gamma - 1.0) * (conserved_(c, 3) - 0.5 * rho * (u * u + v * v));
  }

  auto cell_state = [&](int c) -> Eigen::Vector4d {
    return primitive_.row(c).transpose();
  };

  // Ghost state seen across a boundary face from interior state w.
  auto ghost_state = [&](const Eigen::Vector4d& w,
                         const Face& f) -> Eigen::Vector4d {
    switch (f.tag) {
      case FaceTag::wall: return mirror_velocity(w, f.normal);
      case FaceTag::inflow: return freestream_ndp_;
      default: return w;  // outflow: zero gradient
    }
  };

  // Limited slopes per direction, with boundary ghosts per face tag.
  for (int j = 0; j < nt; ++j) {
    for (int i = 0; i < nr; ++i) {
      const int c = grid_.cell(i, j);
      const Eigen::Vector4d w = cell_state(c);
      const Eigen::Vector4d lo =
          i == 0 ? ghost_state(w, grid_.r_faces[grid_.r_face(0, j)])
                 : cell_state(grid_.cell(i - 1, j));
      const Eigen::Vector4d hi =
          i == nr - 1 ? ghost_state(w, grid_.r_faces[grid_.r_face(nr, j)])
                      : cell_state(grid_.cell(i + 1, j));
      for (int k = 0; k < 4; ++k)
        slope_r_(c, k) = beta * minmod(w[k] - lo[k], hi[k] - w[k]);
    }
  }
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      const int c = grid_.cell(i, j);
      const Eigen::Vector4d w = cell_state(c);
      const Eigen::Vector4d lo =
          j == 0 ? ghost_state(w, grid_.t_faces[grid_.t_face(i, 0)])
                 : cell_state(grid_.cell(i, j - 1));
      const Eigen::Vector4d hi =
          j == nt - 1 ? ghost_state(w, grid_.t_faces[grid_.t_face(i, nt)])
                      : cell_state(grid_.cell(i, j + 1));
      for (int k = 0; k < 4; ++k)
        slope_t_(c, k) = beta * minmod(w[k] - lo[k], hi[k] - w[k]);
    }
  }

  divergence.setZero();
  boundary_flux_.setZero();

  // A face falls back to first-order states when a reconstructed side loses
  // positivity.
  auto resolve_face = [&](Eigen::Vector4d wL, Eigen::Vector4d wR,
                          const Eigen::Vector4d& cellL,
                          const Eigen::Vector4d& cellR,
                          const Eigen::Vector2d& n) {
    if (!physical(wL) || !physical(wR)) {
      wL = cellL;
      wR = cellR;
    }
    return rusanov_raw_p(wL, wR, n, gamma);
  };

  // Radial faces.
  for (int j = 0; j < nt; ++j) {
    for (int i = 0; i <= nr; ++i) {
      const Face& f = grid_.r_faces[grid_.r_face(i, j)];
      Eigen::Vector4d flux;
      if (f.tag == FaceTag::interior) {
        const int cl = grid_.cell(i - 1, j);
        const int cr = grid_.cell(i, j);
        const Eigen::Vector4d wl =
            cell_state(cl) + 0.5 * slope_r_.row(cl).transpose();
        const Eigen::Vector4d wr =
            cell_state(cr) - 0.5 * slope_r_.row(cr).transpose();
        flux = resolve_face(wl, wr, cell_state(cl), cell_state(cr), f.normal);
      } else if (i == 0) {
        // Boundary on the low-r side of cell (0, j); ghost fills the low side.
        const int cr = grid_.cell(0, j);
        Eigen::Vector4d wr = cell_state(cr) - 0.5 * slope_r_.row(cr).transpose();
        if (!physical(wr)) wr = cell_state(cr);
        flux = rusanov_raw_p(ghost_state(wr, f), wr, f.normal, gamma);
      } else {
        const int cl = grid_.cell(nr - 1, j);
        Eigen::Vector4d wl = cell_state(cl) + 0.5 * slope_r_.row(cl).transpose();
        if (!physical(wl)) wl = cell_state(cl);
        flux = rusanov_raw_p(wl, ghost_state(wl, f), f.normal, gamma);
      }
      const Eigen::Vector4d fl = flux * f.length;
      if (i > 0) divergence.row(grid_.cell(i - 1, j)) += fl.transpose();
      if (i < nr) divergence.row(grid_.cell(i, j)) -= fl.transpose();
      if (i == 0) boundary_flux_ -= fl;
      if (i == nr) boundary_flux_ += fl;
    }
  }

  // Angular faces.
  for (int j = 0; j <= nt; ++j) {
    for (int i = 0; i < nr; ++i) {
      const Face& f = grid_.t_faces[grid_.t_face(i, j)];
      Eigen::Vector4d flux;
      if (f.tag == FaceTag::interior) {
        const int cl = grid_.cell(i, j - 1);
        const int cr = grid_.cell(i, j);
        const Eigen::Vector4d wl =
            cell_state(cl) + 0.5 * slope_t_.row(cl).transpose();
        const Eigen::Vector4d wr =
            cell_state(cr) - 0.5 * slope_t_.row(cr).transpose();
        flux = resolve_face(wl, wr, cell_state(cl), cell_state(cr), f.normal);
      } else if (j == 0) {
        const int cr = grid_.cell(i, 0);
        Eigen::Vector4d wr = cell_state(cr) - 0.5 * slope_t_.row(cr).transpose();
        if (!physical(wr)) wr = cell_state(cr);
        flux = rusanov_raw_p(ghost_state(wr, f), wr, f.normal, gamma);
      } else {
        const int cl = grid_.cell(i, nt - 1);
        Eigen::Vector4d wl = cell_state(cl) + 0.5 * slope_t_.row(cl).transpose();
        if (!physical(wl)) wl = cell_state(cl);
        flux = rusanov_raw_p(wl, ghost_state(wl, f), f.normal, gamma);
      }
      const Eigen::Vector4d fl = flux * f.length;
      if (j > 0) divergence.row(grid_.cell(i, j - 1)) += fl.transpose();
      if (j < nt) divergence.row(grid_.cell(i, j)) -= fl.transpose();
      if (j == 0) boundary_flux_ -= fl;
      if (j == nt) boundary_flux_ += fl;
    }
  }

  return residual_metric(divergence, grid_.volumes);
}

double EulerFvSolver::time_step() {
  double metric;
  try {
    metric = assemble_residual(divergence_);
  } catch (const NumericalError& e) {
    throw SolverDivergence(std::string("time_step: ") + e.what() +
                               " at iteration " + std::to_string(iter_),
                           iter_, -1, history_);
  }

  const double cfl = cfl_schedule(iter_, cfg_);
  const double gamma = gas_.gamma;
  for (Eigen::Index c = 0; c < conserved_.rows(); ++c) {
    const double rho = primitive_(c, 0);
    const double p = primitive_(c, 3);
    const double speed =
        std::hypot(primitive_(c, 1), primitive_(c, 2));
    const double a = std::sqrt(gamma * std::max(p, 0.0) / rho);
    const double dt = cfl * min_spacing_[c] / (speed + a);
    conserved_.row(c) -=
        (dt / grid_.volumes[c]) * divergence_.row(c);
  }

  if (!conserved_.allFinite()) {
    int bad_cell = -1;
    for (Eigen::Index c = 0; c < conserved_.rows(); ++c)
      if (!conserved_.row(c).allFinite()) {
        bad_cell = static_cast<int>(c);
        break;
      }
    throw SolverDivergence(
        "time_step: non-finite state at iteration " + std::to_string(iter_) +
            ", cell " + std::to_string(bad_cell),
        iter_, bad_cell, history_);
  }

  ++iter_;
  history_.push_back(metric);
  return metric;
}

SolveResult solve_steady(const Eigen::Ref<const FieldMatrix>& initial,
                         const StructuredGrid& grid, const SolverConfig& cfg,
                         double mach, const SolveOptions& opts,
                         GasConstants gas, FreestreamRef ref) {
  if (!initial.allFinite())
    throw ArgumentError("solve_steady: initial field must be finite");
  EulerFvSolver solver(grid, cfg, mach, gas, ref);
  solver.set_field(initial);

  SolveResult out;
  std::optional<double> threshold = opts.absolute_threshold;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const double res = solver.time_step();
    out.history.residuals.push_back(res);
    if (!opts.absolute_threshold && it == 9)
      threshold = res * std::pow(10.0, -cfg.residual_drop_target);
    if (threshold && res <= *threshold) {
      out.history.converged_iter = it + 1;
      break;
    }
  }
  out.field = solver.field();
  return out;
}

}  // namespace nbflab
