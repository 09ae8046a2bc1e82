#include "nbflab/grid.hpp"

#include <cmath>
#include <numbers>

#include "nbflab/errors.hpp"

namespace nbflab {

namespace {

// Unit normal of segment a->b, rotated so it points from the "low" cell side
// to the "high" cell side; `toward` is any point on the high side.
Face make_face(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
               const Eigen::Vector2d& toward, FaceTag tag) {
  Face f;
  const Eigen::Vector2d e = b - a;
  f.length = e.norm();
  f.centroid = 0.5 * (a + b);
  Eigen::Vector2d n(e.y(), -e.x());
  if (n.dot(toward - f.centroid) < 0.0) n = -n;
  f.normal = n / f.length;
  f.tag = tag;
  return f;
}

}  // namespace

StructuredGrid build_grid(int nr, int ntheta, double r_outer) {
  if (nr < 4 || ntheta < 4)
    throw ArgumentError("build_grid: nr and ntheta must be at least 4");
  if (!(r_outer > 1.0))
    throw ArgumentError("build_grid: r_outer must exceed the cylinder radius 1");

  StructuredGrid g;
  g.nr = nr;
  g.ntheta = ntheta;
  g.r_outer = r_outer;

  const double theta0 = std::numbers::pi / 2.0;
  const double dtheta = (std::numbers::pi / 2.0) / ntheta;
  const double dr = (r_outer - g.r_inner) / nr;

  g.nodes.resize((nr + 1) * (ntheta + 1), 2);
  for (int j = 0; j <= ntheta; ++j) {
    const double th = theta0 + j * dtheta;
    for (int i = 0; i <= nr; ++i) {
      const double r = g.r_inner + i * dr;
      g.nodes.row(g.node(i, j)) << r * std::cos(th), r * std::sin(th);
    }
  }

  g.centroids.resize(g.n_cells(), 2);
  g.volumes.resize(g.n_cells());
  for (int j = 0; j < ntheta; ++j) {
    for (int i = 0; i < nr; ++i) {
      const Eigen::Vector2d p0 = g.nodes.row(g.node(i, j));
      const Eigen::Vector2d p1 = g.nodes.row(g.node(i + 1, j));
      const Eigen::Vector2d p2 = g.nodes.row(g.node(i + 1, j + 1));
      const Eigen::Vector2d p3 = g.nodes.row(g.node(i, j + 1));
      // Shoelace area and centroid of the quad p0 p1 p2 p3.
      double area2 = 0.0;
      Eigen::Vector2d c = Eigen::Vector2d::Zero();
      const Eigen::Vector2d pts[4] = {p0, p1, p2, p3};
      for (int k = 0; k < 4; ++k) {
        const Eigen::Vector2d& a = pts[k];
        const Eigen::Vector2d& b = pts[(k + 1) % 4];
        const double cross = a.x() * b.y() - b.x() * a.y();
        area2 += cross;
        c += (a + b) * cross;
      }
      const double area = 0.5 * std::abs(area2);
      g.volumes[g.cell(i, j)] = area;
      g.centroids.row(g.cell(i, j)) = c / (3.0 * area2);
    }
  }

  g.r_faces.resize((nr + 1) * ntheta);
  for (int j = 0; j < ntheta; ++j) {
    for (int i = 0; i <= nr; ++i) {
      const Eigen::Vector2d a = g.nodes.row(g.node(i, j));
      const Eigen::Vector2d b = g.nodes.row(g.node(i, j + 1));
      const int high_cell = i < nr ? g.cell(i, j) : g.cell(nr - 1, j);
      Eigen::Vector2d toward = g.centroids.row(high_cell);
      if (i == nr) toward = 2.0 * (0.5 * (a + b)) - toward;  // outward of domain
      FaceTag tag = FaceTag::interior;
      if (i == 0) tag = FaceTag::wall;
      if (i == nr) tag = FaceTag::inflow;
      g.r_faces[g.r_face(i, j)] = make_face(a, b, toward, tag);
    }
  }

  g.t_faces.resize(nr * (ntheta + 1));
  for (int j = 0; j <= ntheta; ++j) {
    for (int i = 0; i < nr; ++i) {
      const Eigen::Vector2d a = g.nodes.row(g.node(i, j));
      const Eigen::Vector2d b = g.nodes.row(g.node(i + 1, j));
      const int high_cell = j < ntheta ? g.cell(i, j) : g.cell(i, ntheta - 1);
      Eigen::Vector2d toward = g.centroids.row(high_cell);
      if (j == ntheta) toward = 2.0 * (0.5 * (a + b)) - toward;
      FaceTag tag = FaceTag::interior;
      if (j == 0 || j == ntheta) tag = FaceTag::outflow;
      g.t_faces[g.t_face(i, j)] = make_face(a, b, toward, tag);
    }
  }

  return g;
}

}  // namespace nbflab
