#include "nbflab/euler.hpp"

#include <string>

namespace nbflab {

namespace {

std::array<double, 4> to_array(const Eigen::Vector4d& w) {
  return {w[0], w[1], w[2], w[3]};
}

}  // namespace

ConservativeState to_conservative(const PrimitiveState& w) {
  return {w.rho, w.rho * w.u, w.rho * w.v, w.E};
}

PrimitiveState to_primitive(const ConservativeState& q) {
  if (q.rho == 0.0)
    throw NumericalError("to_primitive: zero density");
  return {q.rho, q.rho_u / q.rho, q.rho_v / q.rho, q.E};
}

double pressure(const PrimitiveState& w, const GasConstants& gas) {
  return pressure_of(to_array(w.vec()), gas.gamma);
}

double temperature(const PrimitiveState& w, const GasConstants& gas) {
  if (w.rho == 0.0)
    throw NumericalError("temperature: zero density");
  return pressure(w, gas) / (gas.r_gas * w.rho);
}

double mach_number(const PrimitiveState& w, const GasConstants& gas) {
  const double t = temperature(w, gas);
  if (t <= 0.0)
    throw NumericalError("mach_number: non-positive temperature " +
                         std::to_string(t));
  const double speed = std::sqrt(w.u * w.u + w.v * w.v);
  return speed / std::sqrt(gas.gamma * gas.r_gas * t);
}

double speed_of_sound(const PrimitiveState& w, const GasConstants& gas) {
  const double t = temperature(w, gas);
  if (t <= 0.0)
    throw NumericalError("speed_of_sound: non-positive temperature");
  return std::sqrt(gas.gamma * gas.r_gas * t);
}

Eigen::Vector4d flux_f1(const PrimitiveState& w, const GasConstants& gas) {
  const auto f = flux_f1_of(to_array(w.vec()), gas.gamma);
  return {f[0], f[1], f[2], f[3]};
}

Eigen::Vector4d flux_f2(const PrimitiveState& w, const GasConstants& gas) {
  const auto f = flux_f2_of(to_array(w.vec()), gas.gamma);
  return {f[0], f[1], f[2], f[3]};
}

namespace {

using Dual4 = Dual<double, 4>;

template <std::array<Dual4, 4> (*Flux)(const std::array<Dual4, 4>&, double)>
Eigen::Matrix4d flux_jacobian(const PrimitiveState& w, const GasConstants& gas) {
  std::array<Dual4, 4> wd;
  const Eigen::Vector4d wv = w.vec();
  for (std::size_t i = 0; i < 4; ++i) wd[i] = Dual4(wv[i], i);
  const auto f = Flux(wd, gas.gamma);
  Eigen::Matrix4d jac;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) jac(i, j) = f[i].d[j];
  return jac;
}

}  // namespace

Eigen::Matrix4d flux_jacobian_f1(const PrimitiveState& w,
                                 const GasConstants& gas) {
  return flux_jacobian<&flux_f1_of<Dual4>>(w, gas);
}

Eigen::Matrix4d flux_jacobian_f2(const PrimitiveState& w,
                                 const GasConstants& gas) {
  return flux_jacobian<&flux_f2_of<Dual4>>(w, gas);
}

Eigen::Vector4d interior_residual(const PrimitiveState& w,
                                  const Eigen::Vector4d& wx,
                                  const Eigen::Vector4d& wy,
                                  const GasConstants& gas) {
  // (dF/dw) g is the directional derivative of the flux at w along g; a
  // single-slot dual evaluation applies the chain rule exactly.
  using D1 = Dual<double, 1>;
  std::array<D1, 4> wdx, wdy;
  const Eigen::Vector4d wv = w.vec();
  for (std::size_t i = 0; i < 4; ++i) {
    wdx[i] = D1(wv[i]);
    wdx[i].d[0] = wx[i];
    wdy[i] = D1(wv[i]);
    wdy[i].d[0] = wy[i];
  }
  const auto f1 = flux_f1_of(wdx, gas.gamma);
  const auto f2 = flux_f2_of(wdy, gas.gamma);
  Eigen::Vector4d r;
  for (std::size_t i = 0; i < 4; ++i) r[i] = f1[i].d[0] + f2[i].d[0];
  return r;
}

InteriorResidualPartials interior_residual_partials(const PrimitiveState& w,
                                                    const Eigen::Vector4d& wx,
                                                    const Eigen::Vector4d& wy,
                                                    const GasConstants& gas) {
  // Nested duals: the inner 12 slots track (w, wx, wy); the outer single slot
  // extracts the directional derivative that defines the residual.
  using Inner = Dual<double, 12>;
  using D1 = Dual<Inner, 1>;
  const Eigen::Vector4d wv = w.vec();

  std::array<D1, 4> wdx, wdy;
  for (std::size_t i = 0; i < 4; ++i) {
    Inner wi(wv[i], i);
    Inner wxi(wx[i], 4 + i);
    Inner wyi(wy[i], 8 + i);
    wdx[i].v = wi;
    wdx[i].d[0] = wxi;
    wdy[i].v = wi;
    wdy[i].d[0] = wyi;
  }
  const auto f1 = flux_f1_of(wdx, gas.gamma);
  const auto f2 = flux_f2_of(wdy, gas.gamma);

  InteriorResidualPartials out;
  for (std::size_t i = 0; i < 4; ++i) {
    const Inner ri = f1[i].d[0] + f2[i].d[0];
    out.r[i] = ri.v;
    for (std::size_t j = 0; j < 4; ++j) {
      out.dr_dw(i, j) = ri.d[j];
      out.dr_dwx(i, j) = ri.d[4 + j];
      out.dr_dwy(i, j) = ri.d[8 + j];
    }
  }
  return out;
}

Eigen::VectorXd boundary_residual(const Eigen::Vector2d& x,
                                  const PrimitiveState& w,
                                  const PdeParameter& psi, BoundaryTag tag,
                                  const GasConstants& gas,
                                  const FreestreamRef& ref) {
  switch (tag) {
    case BoundaryTag::inflow: {
      const PrimitiveState inf = freestream_state(psi.mach, gas, ref);
      return w.vec() - inf.vec();
    }
    case BoundaryTag::wall: {
      const double norm = x.norm();
      if (norm == 0.0)
        throw ArgumentError("boundary_residual: wall point at the origin");
      // Outward normal of the flow domain on the unit cylinder points toward
      // the cylinder center: n = -x / |x|.
      const Eigen::Vector2d n = -x / norm;
      Eigen::VectorXd r(1);
      r[0] = w.u * n.x() + w.v * n.y();
      return r;
    }
    case BoundaryTag::outflow:
      return Eigen::VectorXd(0);
  }
  throw ArgumentError("boundary_residual: unknown boundary tag");
}

PrimitiveState freestream_state(double mach, const GasConstants& gas,
                                const FreestreamRef& ref) {
  const double p = ref.rho * gas.r_gas * ref.temperature;
  const double a = std::sqrt(gas.gamma * gas.r_gas * ref.temperature);
  const double u = mach * a;
  const double energy = p / (gas.gamma - 1.0) + 0.5 * ref.rho * u * u;
  return {ref.rho, u, 0.0, energy};
}

NondimScales NondimScales::acoustic(const GasConstants& gas,
                                    const FreestreamRef& ref) {
  const double a = std::sqrt(gas.gamma * gas.r_gas * ref.temperature);
  NondimScales s;
  s.state = {ref.rho, a, a, ref.rho * a * a};
  return s;
}

NondimScales NondimScales::freestream_velocity(double mach,
                                               const GasConstants& gas,
                                               const FreestreamRef& ref) {
  const double a = std::sqrt(gas.gamma * gas.r_gas * ref.temperature);
  const double u = mach * a;
  NondimScales s;
  s.state = {ref.rho, u, u, ref.rho * u * u};
  return s;
}

}  // namespace nbflab
