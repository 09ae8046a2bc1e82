#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "nbflab/errors.hpp"
#include "nbflab/fv.hpp"
#include "nbflab/grid.hpp"
#include "nbflab/rng.hpp"

using namespace nbflab;

namespace {

PrimitiveState random_state(Rng& rng) {
  PrimitiveState w;
  w.rho = uniform(rng, 0.1, 5.0);
  w.u = uniform(rng, -3.0, 3.0);
  w.v = uniform(rng, -3.0, 3.0);
  const double p = uniform(rng, 0.1, 10.0);
  w.E = p / 0.4 + 0.5 * w.rho * (w.u * w.u + w.v * w.v);
  return w;
}

void retag_all(StructuredGrid& g, FaceTag tag) {
  for (auto& f : g.r_faces)
    if (f.tag != FaceTag::interior) f.tag = tag;
  for (auto& f : g.t_faces)
    if (f.tag != FaceTag::interior) f.tag = tag;
}

FieldMatrix uniform_field(const StructuredGrid& g, const PrimitiveState& w) {
  FieldMatrix f(g.n_cells(), 4);
  for (Eigen::Index c = 0; c < f.rows(); ++c)
    f.row(c) = w.vec().transpose();
  return f;
}

}  // namespace

TEST_CASE("build_grid: basic construction") {
  const StructuredGrid g = build_grid(4, 4, 4.0);
  CHECK(g.n_cells() == 16);
  CHECK((g.volumes.array() > 0.0).all());
  CHECK_THROWS_AS(build_grid(3, 8, 4.0), ArgumentError);
  CHECK_THROWS_AS(build_grid(8, 8, 0.9), ArgumentError);
}

TEST_CASE("build_grid: total area approximates the annulus quadrant") {
  const StructuredGrid g = build_grid(64, 64, 4.0);
  const double area = g.volumes.sum();
  const double exact = std::numbers::pi / 4.0 * (16.0 - 1.0);
  CHECK(std::abs(area - exact) / exact < 0.005);
}

TEST_CASE("build_grid: face normals of every cell close up") {
  const StructuredGrid g = build_grid(8, 12, 3.0);
  for (int j = 0; j < g.ntheta; ++j) {
    for (int i = 0; i < g.nr; ++i) {
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      const Face& rlo = g.r_faces[g.r_face(i, j)];
      const Face& rhi = g.r_faces[g.r_face(i + 1, j)];
      const Face& tlo = g.t_faces[g.t_face(i, j)];
      const Face& thi = g.t_faces[g.t_face(i, j + 1)];
      sum -= rlo.normal * rlo.length;
      sum += rhi.normal * rhi.length;
      sum -= tlo.normal * tlo.length;
      sum += thi.normal * thi.length;
      CHECK(sum.norm() < 1e-12);
    }
  }
}

TEST_CASE("build_grid: boundary tags") {
  const StructuredGrid g = build_grid(5, 6, 2.5);
  for (int j = 0; j < g.ntheta; ++j) {
    CHECK(g.r_faces[g.r_face(0, j)].tag == FaceTag::wall);
    CHECK(g.r_faces[g.r_face(g.nr, j)].tag == FaceTag::inflow);
  }
  for (int i = 0; i < g.nr; ++i) {
    CHECK(g.t_faces[g.t_face(i, 0)].tag == FaceTag::outflow);
    CHECK(g.t_faces[g.t_face(i, g.ntheta)].tag == FaceTag::outflow);
  }
  // theta = 90 deg boundary sits on the +y axis, theta = 180 deg on the -x axis
  CHECK(g.nodes(g.node(0, 0), 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g.nodes(g.node(0, g.ntheta), 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rusanov: consistency, stagnant state, antisymmetry") {
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const PrimitiveState w = random_state(rng);
    const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const Eigen::Vector2d n(std::cos(phi), std::sin(phi));
    const Eigen::Vector4d f = rusanov_flux(w, w, n);
    const Eigen::Vector4d exact = flux_f1(w) * n.x() + flux_f2(w) * n.y();
    CHECK((f - exact).cwiseAbs().maxCoeff() <
          1e-13 * std::max(1.0, exact.cwiseAbs().maxCoeff()));

    const PrimitiveState w2 = random_state(rng);
    const Eigen::Vector4d fwd = rusanov_flux(w, w2, n);
    const Eigen::Vector4d bwd = rusanov_flux(w2, w, -n);
    CHECK((fwd + bwd).cwiseAbs().maxCoeff() <
          1e-12 * std::max(1.0, fwd.cwiseAbs().maxCoeff()));
  }

  const PrimitiveState stag{1.0, 0.0, 0.0, 2.5};  // P = 1
  const Eigen::Vector4d f = rusanov_flux(stag, stag, {1.0, 0.0});
  CHECK(f.isApprox(Eigen::Vector4d(0, 1, 0, 0), 1e-14));

  const PrimitiveState bad{1.0, 0.0, 0.0, -1.0};
  CHECK_THROWS_AS(rusanov_flux(bad, stag, {1.0, 0.0}), NumericalError);
}

TEST_CASE("minmod reconstruction") {
  // constant data: face states equal the cell value
  Eigen::VectorXd constant = Eigen::VectorXd::Constant(7, 3.25);
  const ReconstructedLine c = minmod_reconstruct(constant);
  CHECK((c.left.array() == 3.25).all());
  CHECK((c.right.array() == 3.25).all());

  // linear data: exact face values at interior faces
  Eigen::VectorXd linear(7);
  for (int i = 0; i < 7; ++i) linear[i] = 0.5 + 2.0 * i;
  const ReconstructedLine l = minmod_reconstruct(linear);
  for (int f = 1; f < 5; ++f) {
    const double exact = linear[f] + 1.0;  // midpoint between cells f and f+1
    CHECK(l.left[f] == doctest::Approx(exact).epsilon(1e-14));
    CHECK(l.right[f] == doctest::Approx(exact).epsilon(1e-14));
  }

  // local maximum: zero slope at the extremum cell
  Eigen::VectorXd bump(7);
  bump << 0, 1, 2, 5, 2, 1, 0;
  const Eigen::VectorXd slopes = minmod_slopes(bump);
  CHECK(slopes[2] == 0.0);  // cell holding the maximum

  CHECK_THROWS_AS(minmod_slopes(Eigen::VectorXd::Zero(4)), ArgumentError);
}

TEST_CASE("schedules") {
  SolverConfig cfg;
  cfg.cfl_end = 10.0;
  CHECK(cfl_schedule(0, cfg) == 0.01);
  CHECK(cfl_schedule(500, cfg) == doctest::Approx(5.005).epsilon(1e-12));
  CHECK(cfl_schedule(1000, cfg) == 10.0);
  CHECK(cfl_schedule(5000, cfg) == 10.0);

  CHECK(blend_schedule(100, cfg) == 0.0);
  CHECK(blend_schedule(250, cfg) == 0.0);
  CHECK(blend_schedule(500, cfg) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(blend_schedule(800, cfg) == 1.0);
}

TEST_CASE("residual metric") {
  FieldMatrix zeros = FieldMatrix::Zero(5, 4);
  Eigen::VectorXd vols = Eigen::VectorXd::Ones(5);
  CHECK(residual_metric(zeros, vols) == 0.0);

  FieldMatrix one_cell(1, 4);
  one_cell << 2, 2, 2, 2;
  Eigen::VectorXd vol2 = Eigen::VectorXd::Constant(1, 2.0);
  CHECK(residual_metric(one_cell, vol2) == doctest::Approx(1.0).epsilon(1e-14));

  Rng rng(8);
  FieldMatrix r(6, 4);
  for (Eigen::Index i = 0; i < r.size(); ++i)
    r.data()[i] = uniform(rng, -2.0, 2.0);
  Eigen::VectorXd v(6);
  for (int i = 0; i < 6; ++i) v[i] = uniform(rng, 0.5, 2.0);
  const double base = residual_metric(r, v);
  CHECK(residual_metric(-3.0 * r, v) == doctest::Approx(3.0 * base).epsilon(1e-12));
}

TEST_CASE("freestream preservation on an all-farfield grid") {
  StructuredGrid g = build_grid(16, 16, 4.0);
  retag_all(g, FaceTag::inflow);
  SolverConfig cfg;
  EulerFvSolver solver(g, cfg, 10.0);
  const FieldMatrix before = solver.field();
  for (int it = 0; it < 20; ++it) {
    const double res = solver.time_step();
    CHECK(res <= 1e-12);
  }
  const FieldMatrix after = solver.field();
  CHECK((after - before).cwiseAbs().maxCoeff() <
        1e-11 * before.cwiseAbs().maxCoeff());
}

TEST_CASE("global conservation: interior fluxes telescope to the boundary flux") {
  StructuredGrid g = build_grid(12, 12, 4.0);
  SolverConfig cfg;
  cfg.first_order_until = 0;  // exercise the second-order path immediately
  cfg.blend_until = 1;
  EulerFvSolver solver(g, cfg, 10.0);

  const PrimitiveState inf = freestream_state(10.0);
  FieldMatrix init(g.n_cells(), 4);
  for (int j = 0; j < g.ntheta; ++j)
    for (int i = 0; i < g.nr; ++i) {
      const int c = g.cell(i, j);
      const double bump = 1.0 + 0.05 * std::sin(0.7 * i) * std::cos(0.5 * j);
      init.row(c) << inf.rho * bump, inf.u * (1.0 - 0.02 * i), inf.v,
          inf.E * bump;
    }
  solver.set_field(init);
  solver.time_step();

  const Eigen::Vector4d cell_sum = solver.last_divergence().colwise().sum();
  const Eigen::Vector4d boundary = solver.last_boundary_flux();
  const double scale = std::max(1.0, boundary.cwiseAbs().maxCoeff());
  CHECK((cell_sum - boundary).cwiseAbs().maxCoeff() / scale < 1e-10);
}

TEST_CASE("reported residual equals the metric of the pre-update divergence") {
  StructuredGrid g = build_grid(8, 8, 4.0);
  SolverConfig cfg;
  EulerFvSolver solver(g, cfg, 10.0);
  PrimitiveState inf = freestream_state(10.0);
  FieldMatrix init(g.n_cells(), 4);
  for (Eigen::Index c = 0; c < init.rows(); ++c) {
    const double bump = 1.0 + 0.01 * static_cast<double>(c % 7);
    init.row(c) << inf.rho * bump, inf.u, inf.v, inf.E * bump;
  }
  solver.set_field(init);
  const double reported = solver.time_step();
  CHECK(reported ==
        residual_metric(solver.last_divergence(), g.volumes));
  CHECK(reported > 0.0);
}

TEST_CASE("single-cell balance: metric of imposed fluxes is |s|/V per equation") {
  // Imposed per-cell flux sums s with volume V contribute |s|/V per equation.
  FieldMatrix s(1, 4);
  s << -3.0, 1.5, 0.0, 6.0;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(1, 2.0);
  const double expected = (3.0 / 2.0 + 1.5 / 2.0 + 0.0 + 6.0 / 2.0) / 4.0;
  CHECK(residual_metric(s, v) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("warm start from a converged field reconverges immediately") {
  const StructuredGrid g = build_grid(24, 24, 4.0);
  SolverConfig cfg;
  cfg.max_iters = 20000;
  cfg.residual_drop_target = 4.0;

  EulerFvSolver solver(g, cfg, 10.0);
  const FieldMatrix freestream_init = solver.field();
  const SolveResult first = solve_steady(freestream_init, g, cfg, 10.0);
  REQUIRE(first.history.converged_iter.has_value());

  const double threshold =
      first.history.residuals[9] * std::pow(10.0, -cfg.residual_drop_target);
  SolveOptions opts;
  opts.absolute_threshold = threshold;
  const SolveResult second = solve_steady(first.field, g, cfg, 10.0, opts);
  REQUIRE(second.history.converged_iter.has_value());
  CHECK(*second.history.converged_iter <= 50);
}

TEST_CASE("solver divergence carries partial history") {
  const StructuredGrid g = build_grid(8, 8, 4.0);
  SolverConfig cfg;
  cfg.cfl_start = 1e6;  // guaranteed blow-up
  cfg.cfl_end = 1e6;
  cfg.max_iters = 50;
  EulerFvSolver solver(g, cfg, 20.0);
  bool threw = false;
  try {
    for (int i = 0; i < 50; ++i) solver.time_step();
  } catch (const SolverDivergence& e) {
    threw = true;
    CHECK(e.iteration >= 0);
  }
  CHECK(threw);
}
