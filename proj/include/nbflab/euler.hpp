#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "nbflab/dual.hpp"
#include "nbflab/errors.hpp"

namespace nbflab {

struct GasConstants {
  double gamma = 1.4;
  double r_gas = 287.058;
};

/// Freestream thermodynamic reference (density and static temperature).
struct FreestreamRef {
  double rho = 1.0;  // kg/m^3
  double temperature = 300.0;  // K
};

/// PDE parameter: the freestream Mach number is the whole parameter vector for
/// this benchmark.
struct PdeParameter {
  double mach = 10.0;
};

/// State vector w = [rho, u, v, E]: density, velocities, total energy per
/// unit volume.
struct PrimitiveState {
  double rho = 0.0;
  double u = 0.0;
  double v = 0.0;
  double E = 0.0;

  Eigen::Vector4d vec() const { return {rho, u, v, E}; }
  static PrimitiveState from_vec(const Eigen::Vector4d& w) {
    return {w[0], w[1], w[2], w[3]};
  }
};

/// Conserved quantities [rho, rho*u, rho*v, E].
struct ConservativeState {
  double rho = 0.0;
  double rho_u = 0.0;
  double rho_v = 0.0;
  double E = 0.0;

  Eigen::Vector4d vec() const { return {rho, rho_u, rho_v, E}; }
};

ConservativeState to_conservative(const PrimitiveState& w);
PrimitiveState to_primitive(const ConservativeState& q);

/// Pressure closure P = (gamma - 1) [E - rho (u^2 + v^2) / 2], on a generic
/// scalar so dual numbers propagate exact derivatives.
template <class T>
T pressure_of(const std::array<T, 4>& w, double gamma) {
  return (gamma - 1.0) * (w[3] - 0.5 * (w[0] * (w[1] * w[1] + w[2] * w[2])));
}

/// x-direction flux expanded in the state variables w0..w3.
template <class T>
std::array<T, 4> flux_f1_of(const std::array<T, 4>& w, double gamma) {
  const T p = pressure_of(w, gamma);
  return {w[0] * w[1],
          w[0] * w[1] * w[1] + p,
          w[0] * w[1] * w[2],
          (w[3] + p) * w[1]};
}

/// y-direction flux expanded in the state variables w0..w3.
template <class T>
std::array<T, 4> flux_f2_of(const std::array<T, 4>& w, double gamma) {
  const T p = pressure_of(w, gamma);
  return {w[0] * w[2],
          w[0] * w[1] * w[2],
          w[0] * w[2] * w[2] + p,
          (w[3] + p) * w[2]};
}

double pressure(const PrimitiveState& w, const GasConstants& gas = {});

/// T = P / (R rho). Throws NumericalError when rho == 0.
double temperature(const PrimitiveState& w, const GasConstants& gas = {});

/// M = |u| / sqrt(gamma R T). Throws NumericalError when T <= 0.
double mach_number(const PrimitiveState& w, const GasConstants& gas = {});

double speed_of_sound(const PrimitiveState& w, const GasConstants& gas = {});

Eigen::Vector4d flux_f1(const PrimitiveState& w, const GasConstants& gas = {});
Eigen::Vector4d flux_f2(const PrimitiveState& w, const GasConstants& gas = {});

/// Exact d F / d w, propagated through the flux algebra with dual numbers.
Eigen::Matrix4d flux_jacobian_f1(const PrimitiveState& w,
                                 const GasConstants& gas = {});
Eigen::Matrix4d flux_jacobian_f2(const PrimitiveState& w,
                                 const GasConstants& gas = {});

/// Steady interior operator applied to a locally linearized field:
/// r = (dF1/dw) wx + (dF2/dw) wy. Zero iff the local steady balance holds.
Eigen::Vector4d interior_residual(const PrimitiveState& w,
                                  const Eigen::Vector4d& wx,
                                  const Eigen::Vector4d& wy,
                                  const GasConstants& gas = {});

/// interior_residual together with its exact partial derivatives, for
/// gradient-based training through the operator.
struct InteriorResidualPartials {
  Eigen::Vector4d r;
  Eigen::Matrix4d dr_dw;
  Eigen::Matrix4d dr_dwx;  // equals dF1/dw
  Eigen::Matrix4d dr_dwy;  // equals dF2/dw
};

InteriorResidualPartials interior_residual_partials(
    const PrimitiveState& w, const Eigen::Vector4d& wx,
    const Eigen::Vector4d& wy, const GasConstants& gas = {});

enum class BoundaryTag : std::uint8_t { inflow = 0, wall = 1, outflow = 2 };

/// Boundary operator residuals. inflow: w - freestream(psi) (4 components);
/// wall: u . n_hat with the outward wall normal of the unit cylinder at x
/// (1 component); outflow: unconstrained (empty).
Eigen::VectorXd boundary_residual(const Eigen::Vector2d& x,
                                  const PrimitiveState& w,
                                  const PdeParameter& psi, BoundaryTag tag,
                                  const GasConstants& gas = {},
                                  const FreestreamRef& ref = {});

/// Freestream state at the given Mach number: rho = ref.rho, T = ref.T,
/// u = mach * a_inf along +x, v = 0.
PrimitiveState freestream_state(double mach, const GasConstants& gas = {},
                                const FreestreamRef& ref = {});

/// Scales making the state O(1): [rho_inf, a_inf, a_inf, rho_inf a_inf^2].
/// Coordinates are already scaled by the cylinder radius (= 1).
struct NondimScales {
  Eigen::Vector4d state;

  static NondimScales acoustic(const GasConstants& gas = {},
                               const FreestreamRef& ref = {});
  /// Velocity scale |u_inf| = mach * a_inf instead of a_inf; used internally
  /// by the finite-volume solver so fluxes stay O(1) at every sweep Mach.
  static NondimScales freestream_velocity(double mach,
                                          const GasConstants& gas = {},
                                          const FreestreamRef& ref = {});

  Eigen::Vector4d to_nondim(const Eigen::Vector4d& w) const {
    return w.cwiseQuotient(state);
  }
  Eigen::Vector4d to_physical(const Eigen::Vector4d& w) const {
    return w.cwiseProduct(state);
  }
};

}  // namespace nbflab
