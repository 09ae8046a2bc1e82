#pragma once

#include <Eigen/Dense>

namespace nbflab {

/// Zero-mean unit-variance affine transform, fitted per feature (matrix
/// columns). Constant features have their std clamped to epsilon_floor so the
/// transform stays invertible.
struct ZmuvTransform {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  double epsilon_floor = 1e-12;

  /// Fits mean/std with population variance. data rows are samples, columns
  /// are features. Throws ArgumentError on empty data.
  static ZmuvTransform fit(const Eigen::Ref<const Eigen::MatrixXd>& data,
                           double epsilon_floor = 1e-12);

  /// Identity transform of the given dimension (mean 0, std 1).
  static ZmuvTransform identity(int dim);

  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
  Eigen::MatrixXd invert(const Eigen::Ref<const Eigen::MatrixXd>& z) const;

  double apply1(double x) const { return (x - mean[0]) / std[0]; }
  double invert1(double z) const { return mean[0] + std[0] * z; }

  int dim() const { return static_cast<int>(mean.size()); }
};

}  // namespace nbflab
