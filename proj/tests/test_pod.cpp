#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "nbflab/errors.hpp"
#include "nbflab/pod.hpp"
#include "nbflab/rng.hpp"

using namespace nbflab;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = scale * uniform(rng, -1.0, 1.0);
  return m;
}

Snapshot make_snapshot(const Eigen::MatrixX2d& pts, double mach, Rng& rng) {
  Snapshot s;
  s.mach = mach;
  s.points = pts;
  s.w = random_matrix(rng, static_cast<int>(pts.rows()), 4);
  return s;
}

}  // namespace

TEST_CASE("assemble sorts by psi and rejects mismatched coordinates") {
  Rng rng(1);
  Eigen::MatrixX2d pts = random_matrix(rng, 12, 2);
  std::vector<Snapshot> snaps;
  for (double mach : {14.0, 10.0, 12.0}) snaps.push_back(make_snapshot(pts, mach, rng));

  const SnapshotSet set = assemble(snaps);
  CHECK(set.psis == std::vector<double>{10.0, 12.0, 14.0});
  CHECK(set.data[0].rows() == 12);
  CHECK(set.data[0].cols() == 3);
  // columns follow the sorted order
  CHECK((set.data[2].col(0).array() == snaps[1].w.col(2).array()).all());
  CHECK((set.data[2].col(2).array() == snaps[0].w.col(2).array()).all());

  // shuffled input order gives the identical set
  std::vector<Snapshot> shuffled{snaps[2], snaps[0], snaps[1]};
  const SnapshotSet set2 = assemble(shuffled);
  CHECK(set2.psis == set.psis);
  for (int k = 0; k < 4; ++k)
    CHECK((set2.data[k].array() == set.data[k].array()).all());

  // single file
  const SnapshotSet one = assemble({snaps[0]});
  CHECK(one.data[0].cols() == 1);

  snaps[1].points(3, 0) += 1e-16;
  CHECK_THROWS_AS(assemble(snaps), DataError);
}

TEST_CASE("jacobi eigensolver diagonalizes symmetric matrices") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 16));
    Eigen::MatrixXd m = random_matrix(rng, n, n, 2.0);
    Eigen::MatrixXd a = 0.5 * (m + m.transpose());
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
    jacobi_eigh(a, evals, evecs);
    // descending order
    for (int i = 0; i + 1 < n; ++i) CHECK(evals[i] >= evals[i + 1]);
    // orthonormality and reconstruction
    CHECK((evecs.transpose() * evecs - Eigen::MatrixXd::Identity(n, n))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    const Eigen::MatrixXd recon =
        evecs * evals.asDiagonal() * evecs.transpose();
    CHECK((recon - a).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, a.norm()));
  }
}

TEST_CASE("pod: two identical columns collapse to zero singular values") {
  Eigen::MatrixXd w(2, 2);
  w << 1.0, 1.0, 2.0, 2.0;
  const PodBasis b = compute_pod_matrix(w, 2);
  CHECK(b.singular_values[0] == 0.0);
  CHECK(b.singular_values[1] == 0.0);
  // orthonormal extension still yields an orthonormal basis
  CHECK((b.modes.transpose() * b.modes - Eigen::Matrix2d::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("pod: 2x2 hand-computed decomposition") {
  Eigen::MatrixXd w(2, 2);
  w << 1.0, 2.0, 1.0, 2.0;
  const PodBasis b = compute_pod_matrix(w, 2);
  CHECK(b.mean[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(b.singular_values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.singular_values[1] == doctest::Approx(0.0).epsilon(1e-12));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(b.modes(0, 0) == doctest::Approx(s).epsilon(1e-12));
  CHECK(b.modes(1, 0) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("pod: exact reconstruction at n_bf = D and mode orthonormality") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 30;
    const int d = 7;
    const Eigen::MatrixXd w = random_matrix(rng, n, d, 3.0);
    const PodBasis b = compute_pod_matrix(w, d);

    CHECK((b.modes.transpose() * b.modes - Eigen::MatrixXd::Identity(d, d))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);

    // energy identity
    const Eigen::MatrixXd centered = w.colwise() - b.mean;
    const double energy = b.singular_values.squaredNorm();
    CHECK(std::abs(energy - centered.squaredNorm()) <=
          1e-10 * std::max(1.0, centered.squaredNorm()));

    // projection onto the full basis reconstructs exactly
    const Eigen::MatrixXd recon =
        b.modes * (b.modes.transpose() * centered);
    CHECK((recon - centered).cwiseAbs().maxCoeff() <=
          1e-10 * std::max(1.0, centered.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("truncation error bound") {
  PodBasis b;
  b.singular_values.resize(3);
  b.singular_values << 3.0, 2.0, 1.0;
  b.n_bf = 3;
  CHECK(truncation_error_bound(b, 3) == 0.0);
  CHECK(truncation_error_bound(b, 1) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(truncation_error_bound(b, 7), ArgumentError);
}

TEST_CASE("tail bound equals the rank-k Frobenius truncation error (Eckart-Young)") {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd w = random_matrix(rng, 50, 10, 2.0);
    const PodBasis b = compute_pod_matrix(w, 10);
    const Eigen::MatrixXd centered = w.colwise() - b.mean;
    for (int k = 1; k <= 10; ++k) {
      const Eigen::MatrixXd uk = b.modes.leftCols(k);
      const Eigen::MatrixXd err = centered - uk * (uk.transpose() * centered);
      const double tail = truncation_error_bound(b, k);
      CHECK(std::abs(err.squaredNorm() - tail) <=
            1e-10 * std::max(1.0, centered.squaredNorm()));
    }
  }
}

TEST_CASE("project_coefficients") {
  Rng rng(7);
  const Eigen::MatrixXd w = random_matrix(rng, 40, 6, 2.0);
  const PodBasis b = compute_pod_matrix(w, 6);

  CHECK(project_coefficients(b, b.mean).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::VectorXd field = b.mean + 2.0 * b.modes.col(3);
  Eigen::VectorXd c = project_coefficients(b, field);
  for (int j = 0; j < 6; ++j)
    CHECK(c[j] == doctest::Approx(j == 3 ? 2.0 : 0.0).epsilon(1e-10));

  // normal-equations oracle on a random field
  Eigen::VectorXd f = random_matrix(rng, 40, 1, 5.0);
  const Eigen::VectorXd via_projection = project_coefficients(b, f);
  const Eigen::MatrixXd gram = b.modes.transpose() * b.modes;
  const Eigen::VectorXd via_normal_eq =
      gram.ldlt().solve(b.modes.transpose() * (f - b.mean));
  CHECK((via_projection - via_normal_eq).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pod basis file round trip") {
  Rng rng(8);
  const Eigen::MatrixXd w = random_matrix(rng, 25, 5, 2.0);
  const PodBasis b = compute_pod_matrix(w, 4);
  const PodBasisFile f = to_basis_file(b, 2);
  const std::string bytes = encode_pod_basis(f);
  const PodBasisFile back = decode_pod_basis(bytes, "test");
  CHECK(back.variable_id == 2);
  CHECK((back.mean.array() == b.mean.array()).all());
  CHECK((back.modes.array() == b.modes.array()).all());
  CHECK((back.singular_values.array() == b.singular_values.array()).all());
}

TEST_CASE("compute_pod rejects out-of-range n_bf") {
  Rng rng(9);
  const Eigen::MatrixXd w = random_matrix(rng, 10, 4);
  CHECK_THROWS_AS(compute_pod_matrix(w, 0), ArgumentError);
  CHECK_THROWS_AS(compute_pod_matrix(w, 5), ArgumentError);
}
