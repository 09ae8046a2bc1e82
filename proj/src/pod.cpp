#include "nbflab/pod.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "nbflab/errors.hpp"

namespace nbflab {

SnapshotSet assemble(const std::vector<Snapshot>& snapshots) {
  if (snapshots.empty()) throw ArgumentError("assemble: no snapshot files");

  std::vector<std::size_t> order(snapshots.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return snapshots[a].mach < snapshots[b].mach;
  });

  const Snapshot& first = snapshots[order[0]];
  const Eigen::Index n = first.points.rows();
  for (std::size_t k : order) {
    const Snapshot& s = snapshots[k];
    const bool same =
        s.points.rows() == n &&
        std::memcmp(s.points.data(), first.points.data(),
                    sizeof(double) * static_cast<std::size_t>(n) * 2) == 0;
    if (!same)
      throw DataError("assemble: snapshot coordinates for mach " +
                      std::to_string(s.mach) +
                      " differ from those for mach " +
                      std::to_string(first.mach));
  }
  const int d = static_cast<int>(snapshots.size());
  if (n < d)
    throw ArgumentError("assemble: need at least as many points as snapshots");

  SnapshotSet set;
  set.points = first.points;
  set.psis.reserve(snapshots.size());
  for (auto& m : set.data) m.resize(n, d);
  for (int col = 0; col < d; ++col) {
    const Snapshot& s = snapshots[order[static_cast<std::size_t>(col)]];
    set.psis.push_back(s.mach);
    for (int k = 0; k < 4; ++k) set.data[k].col(col) = s.w.col(k);
  }
  return set;
}

SnapshotSet subset(const SnapshotSet& set, const std::vector<double>& keep) {
  std::vector<int> cols;
  for (double psi : keep) {
    auto it = std::find(set.psis.begin(), set.psis.end(), psi);
    if (it == set.psis.end())
      throw ArgumentError("subset: psi " + std::to_string(psi) +
                          " not present in the snapshot set");
    cols.push_back(static_cast<int>(it - set.psis.begin()));
  }
  std::sort(cols.begin(), cols.end());
  SnapshotSet out;
  out.points = set.points;
  for (int c : cols) out.psis.push_back(set.psis[static_cast<std::size_t>(c)]);
  for (int k = 0; k < 4; ++k) {
    out.data[k].resize(set.points.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
      out.data[k].col(static_cast<Eigen::Index>(j)) = set.data[k].col(cols[j]);
  }
  return out;
}

void jacobi_eigh(Eigen::MatrixXd a, Eigen::VectorXd& eigenvalues,
                 Eigen::MatrixXd& eigenvectors) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw ArgumentError("jacobi_eigh: matrix must be square");
  eigenvectors = Eigen::MatrixXd::Identity(n, n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  const double tol = 1e-14 * std::max(a.norm(), 1e-300);
  for (int sweep = 0; sweep < 200 && off_norm() > tol; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J with the (p, q) rotation
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = eigenvectors(k, p);
          const double vkq = eigenvectors(k, q);
          eigenvectors(k, p) = c * vkp - s * vkq;
          eigenvectors(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  eigenvalues.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) eigenvalues[i] = a(i, i);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return eigenvalues[x] > eigenvalues[y];
  });
  Eigen::VectorXd sorted_vals(n);
  Eigen::MatrixXd sorted_vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted_vals[i] = eigenvalues[order[static_cast<std::size_t>(i)]];
    sorted_vecs.col(i) = eigenvectors.col(order[static_cast<std::size_t>(i)]);
  }
  eigenvalues = std::move(sorted_vals);
  eigenvectors = std::move(sorted_vecs);
}

namespace {

void fix_mode_sign(Eigen::Ref<Eigen::VectorXd> mode) {
  Eigen::Index idx = 0;
  mode.cwiseAbs().maxCoeff(&idx);
  if (mode[idx] < 0.0) mode = -mode;
}

}  // namespace

PodBasis compute_pod_matrix(const Eigen::MatrixXd& w, int n_bf) {
  const Eigen::Index n = w.rows();
  const Eigen::Index d = w.cols();
  if (n_bf < 1 || n_bf > d)
    throw ArgumentError("compute_pod: n_bf must be in [1, D]");

  PodBasis basis;
  basis.n_bf = n_bf;
  basis.mean = w.rowwise().mean();
  const Eigen::MatrixXd centered = w.colwise() - basis.mean;

  Eigen::MatrixXd gram = centered.transpose() * centered;
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  jacobi_eigh(std::move(gram), evals, evecs);

  basis.singular_values.resize(d);
  for (Eigen::Index i = 0; i < d; ++i)
    basis.singular_values[i] = std::sqrt(std::max(evals[i], 0.0));

  const double sigma_tol =
      basis.singular_values.size() > 0
          ? 1e-12 * std::max(basis.singular_values[0], 1.0)
          : 0.0;

  basis.modes.resize(n, n_bf);
  Eigen::Index next_extension = 0;
  for (int j = 0; j < n_bf; ++j) {
    Eigen::VectorXd mode;
    if (basis.singular_values[j] > sigma_tol) {
      mode = centered * evecs.col(j) / basis.singular_values[j];
      // Gram-Schmidt cleanup against earlier modes keeps orthonormality tight.
      for (int k = 0; k < j; ++k)
        mode -= basis.modes.col(k).dot(mode) * basis.modes.col(k);
      mode.normalize();
    } else {
      // Orthonormal extension for exhausted rank: first canonical direction
      // with a substantial component outside the current span.
      for (; next_extension < n; ++next_extension) {
        Eigen::VectorXd cand = Eigen::VectorXd::Unit(n, next_extension);
        for (int k = 0; k < j; ++k)
          cand -= basis.modes.col(k).dot(cand) * basis.modes.col(k);
        const double norm = cand.norm();
        if (norm > 0.5) {
          mode = cand / norm;
          ++next_extension;
          break;
        }
      }
      if (mode.size() == 0)
        throw NumericalError("compute_pod: orthonormal extension failed");
    }
    fix_mode_sign(mode);
    basis.modes.col(j) = mode;
  }
  return basis;
}

std::array<PodBasis, 4> compute_pod(const SnapshotSet& set, int n_bf) {
  return {compute_pod_matrix(set.data[0], n_bf),
          compute_pod_matrix(set.data[1], n_bf),
          compute_pod_matrix(set.data[2], n_bf),
          compute_pod_matrix(set.data[3], n_bf)};
}

double truncation_error_bound(const PodBasis& basis, int n_bf) {
  if (n_bf < 0 || n_bf > basis.singular_values.size())
    throw ArgumentError("truncation_error_bound: n_bf out of range");
  double tail = 0.0;
  for (Eigen::Index d = n_bf; d < basis.singular_values.size(); ++d)
    tail += basis.singular_values[d] * basis.singular_values[d];
  return tail;
}

Eigen::VectorXd project_coefficients(const PodBasis& basis,
                                     const Eigen::VectorXd& field) {
  if (field.size() != basis.mean.size())
    throw ArgumentError("project_coefficients: field length mismatch");
  return basis.modes.transpose() * (field - basis.mean);
}

PodBasisFile to_basis_file(const PodBasis& basis, std::uint32_t variable_id) {
  PodBasisFile f;
  f.variable_id = variable_id;
  f.mean = basis.mean;
  f.singular_values = basis.singular_values;
  f.modes = basis.modes;
  return f;
}

PodBasis from_basis_file(const PodBasisFile& file) {
  PodBasis b;
  b.mean = file.mean;
  b.singular_values = file.singular_values;
  b.modes = file.modes;
  b.n_bf = static_cast<int>(file.modes.cols());
  return b;
}

}  // namespace nbflab
