#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace nbflab {

enum class FaceTag : std::uint8_t { interior = 0, wall = 1, inflow = 2, outflow = 3 };

struct Face {
  Eigen::Vector2d normal;    // unit, oriented toward increasing r (r-faces) or theta (t-faces)
  double length = 0.0;
  Eigen::Vector2d centroid;
  FaceTag tag = FaceTag::interior;
};

/// Body-fitted quarter-annulus grid: r in [1, r_outer], theta in [90, 180]
/// degrees (the upstream quadrant, inflow from -x). Cells are straight-edge
/// quads between the polar nodes. Radial index i runs from the cylinder wall
/// outward, angular index j from theta = 90 deg to 180 deg.
struct StructuredGrid {
  int nr = 0;
  int ntheta = 0;
  double r_inner = 1.0;
  double r_outer = 0.0;

  Eigen::MatrixX2d nodes;       // (nr+1)*(ntheta+1) rows
  Eigen::MatrixX2d centroids;   // nr*ntheta rows
  Eigen::VectorXd volumes;      // polygon areas

  std::vector<Face> r_faces;    // (nr+1)*ntheta, between radially adjacent cells
  std::vector<Face> t_faces;    // nr*(ntheta+1), between angularly adjacent cells

  int n_cells() const { return nr * ntheta; }
  int cell(int i, int j) const { return j * nr + i; }
  int node(int i, int j) const { return j * (nr + 1) + i; }
  int r_face(int i, int j) const { return j * (nr + 1) + i; }  // i in [0, nr]
  int t_face(int i, int j) const { return j * nr + i; }        // j in [0, ntheta]
};

/// Builds the grid with uniform spacing in r and theta. Boundary tags: wall at
/// r_inner, inflow at r_outer, outflow at both theta extremes. Throws
/// ArgumentError for nr/ntheta < 4 or r_outer <= 1.
StructuredGrid build_grid(int nr, int ntheta, double r_outer);

}  // namespace nbflab
