#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "nbflab/io.hpp"

namespace nbflab {

inline constexpr std::array<const char*, 4> kVariableNames = {"rho", "u", "v",
                                                              "E"};

/// Snapshot matrices per state variable, all sharing one coordinate set and
/// ordered by ascending parameter value.
struct SnapshotSet {
  Eigen::MatrixX2d points;
  std::vector<double> psis;
  std::array<Eigen::MatrixXd, 4> data;  // each n x D

  Eigen::Index n_points() const { return points.rows(); }
  int n_snapshots() const { return static_cast<int>(psis.size()); }
};

/// Gathers snapshots into per-variable matrices. Coordinates must match
/// bitwise across files (DataError naming the offenders otherwise). Input
/// order is irrelevant; columns are sorted by psi.
SnapshotSet assemble(const std::vector<Snapshot>& snapshots);

/// Selects the columns whose psi is in keep (ArgumentError if one is missing).
SnapshotSet subset(const SnapshotSet& set, const std::vector<double>& keep);

/// Orthonormal spatial modes of one variable: snapshot mean, left singular
/// vectors, and all D singular values (non-increasing).
struct PodBasis {
  Eigen::VectorXd mean;
  Eigen::MatrixXd modes;            // n x n_bf, orthonormal columns
  Eigen::VectorXd singular_values;  // length D
  int n_bf = 0;
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations, iterated until the
/// off-diagonal Frobenius norm falls below 1e-14 of the input norm.
/// Eigenvalues are returned in descending order.
void jacobi_eigh(Eigen::MatrixXd a, Eigen::VectorXd& eigenvalues,
                 Eigen::MatrixXd& eigenvectors);

/// Snapshot POD of one data matrix: SVD of the mean-subtracted W via the D x D
/// Gram matrix. Zero-sigma modes are completed by orthonormal extension; each
/// mode's largest-magnitude entry is made positive.
PodBasis compute_pod_matrix(const Eigen::MatrixXd& w, int n_bf);

std::array<PodBasis, 4> compute_pod(const SnapshotSet& set, int n_bf);

/// Tail energy sum_{d > n_bf} sigma_d^2 bounding the squared Frobenius
/// reconstruction error of the rank-n_bf truncation.
double truncation_error_bound(const PodBasis& basis, int n_bf);

/// Least-squares coefficients of a field in the basis: U^T (field - mean).
Eigen::VectorXd project_coefficients(const PodBasis& basis,
                                     const Eigen::VectorXd& field);

PodBasisFile to_basis_file(const PodBasis& basis, std::uint32_t variable_id);
PodBasis from_basis_file(const PodBasisFile& file);

}  // namespace nbflab
