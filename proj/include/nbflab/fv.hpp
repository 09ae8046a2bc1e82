#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "nbflab/euler.hpp"
#include "nbflab/grid.hpp"

namespace nbflab {

/// Per-cell primitive field [rho, u, v, E], one row per cell.
using FieldMatrix = Eigen::Matrix<double, Eigen::Dynamic, 4>;

struct SolverConfig {
  double cfl_start = 0.01;
  double cfl_end = 0.9;
  int cfl_ramp_iters = 1000;
  int first_order_until = 250;
  int blend_until = 750;
  int max_iters = 20000;
  double residual_drop_target = 6.0;  // orders of magnitude
  std::uint64_t seed = 0;
};

struct ResidualHistory {
  std::vector<double> residuals;
  std::optional<int> converged_iter;  // 1-based iteration count at convergence
};

/// Rusanov (local Lax-Friedrichs) numerical flux across a face with unit
/// normal n: 0.5 (F(wL) + F(wR)) . n - 0.5 s_max (U_R - U_L). Throws
/// NumericalError if either side has non-positive density or pressure.
Eigen::Vector4d rusanov_flux(const PrimitiveState& wL, const PrimitiveState& wR,
                             const Eigen::Vector2d& n,
                             const GasConstants& gas = {});

/// Limited MUSCL slopes for one grid line. padded holds the ghost value, the
/// m cell values, then the other ghost (size m + 2). slope_scale in [0, 1]
/// blends first order (0) to full second order (1).
Eigen::VectorXd minmod_slopes(const Eigen::Ref<const Eigen::VectorXd>& padded,
                              double slope_scale = 1.0);

/// Limited face states for the m+1 faces of a line of m cells (ghost-padded
/// input as in minmod_slopes). Ghost cells carry zero slope.
struct ReconstructedLine {
  Eigen::VectorXd left;   // state on the low-index side of each face
  Eigen::VectorXd right;  // state on the high-index side
};
ReconstructedLine minmod_reconstruct(
    const Eigen::Ref<const Eigen::VectorXd>& padded, double slope_scale = 1.0);

double cfl_schedule(int iter, const SolverConfig& cfg);
double blend_schedule(int iter, const SolverConfig& cfg);

/// Mean over cells of |residual| / volume, then mean over the four equations.
double residual_metric(const Eigen::Ref<const FieldMatrix>& cell_residuals,
                       const Eigen::Ref<const Eigen::VectorXd>& volumes);

/// Explicit local-time-stepping finite-volume solver for the steady Euler
/// equations on the quarter-annulus grid. Fields cross the API in physical
/// (SI) units; internally the state is scaled by the freestream so the
/// residual metric is O(1) at every Mach.
class EulerFvSolver {
 public:
  EulerFvSolver(const StructuredGrid& grid, const SolverConfig& cfg,
                double mach, GasConstants gas = {}, FreestreamRef ref = {});

  /// Replaces the state with the given primitive SI field.
  void set_field(const Eigen::Ref<const FieldMatrix>& w_physical);
  void set_freestream_field();
  FieldMatrix field() const;  // primitive SI

  /// One forward-Euler pseudo-time update with per-cell time steps. Returns
  /// the residual metric of the pre-update flux divergence. Throws
  /// SolverDivergence (with iteration and cell) on non-finite updates.
  double time_step();

  int iteration() const { return iter_; }
  const std::vector<double>& history() const { return history_; }
  const StructuredGrid& grid() const { return grid_; }

  /// Flux divergence assembled by the latest time_step (per cell, per
  /// equation, nondimensional).
  const FieldMatrix& last_divergence() const { return divergence_; }
  /// Net outward flux through all boundary faces in the latest step. The sum
  /// of last_divergence over cells telescopes to exactly this.
  const Eigen::Vector4d& last_boundary_flux() const { return boundary_flux_; }

 private:
  double assemble_residual(FieldMatrix& divergence);

  const StructuredGrid& grid_;
  SolverConfig cfg_;
  double mach_;
  GasConstants gas_;
  NondimScales scales_;
  Eigen::Vector4d freestream_nd_;   // (rho, u, v, E), solver scaling
  Eigen::Vector4d freestream_ndp_;  // (rho, u, v, P), solver scaling
  FieldMatrix conserved_;  // nondimensional conserved state per cell
  Eigen::VectorXd min_spacing_;
  Eigen::Vector4d boundary_flux_ = Eigen::Vector4d::Zero();
  int iter_ = 0;
  std::vector<double> history_;

  // scratch
  FieldMatrix primitive_, slope_r_, slope_t_, divergence_;
};

struct SolveResult {
  FieldMatrix field;  // primitive SI
  ResidualHistory history;
};

struct SolveOptions {
  /// When set, convergence is declared at this absolute residual level;
  /// otherwise at residual_drop_target orders below the run's own
  /// iteration-10 residual.
  std::optional<double> absolute_threshold;
};

/// Marches to steady state. Divergence raises SolverDivergence with the
/// partial history retained.
SolveResult solve_steady(const Eigen::Ref<const FieldMatrix>& initial,
                         const StructuredGrid& grid, const SolverConfig& cfg,
                         double mach, const SolveOptions& opts = {},
                         GasConstants gas = {}, FreestreamRef ref = {});

}  // namespace nbflab
