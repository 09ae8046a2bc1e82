#include "nbflab/zmuv.hpp"

#include "nbflab/errors.hpp"

namespace nbflab {

ZmuvTransform ZmuvTransform::fit(const Eigen::Ref<const Eigen::MatrixXd>& data,
                                 double epsilon_floor) {
  if (data.rows() == 0 || data.cols() == 0)
    throw ArgumentError("zmuv_fit: empty data");
  ZmuvTransform t;
  t.epsilon_floor = epsilon_floor;
  t.mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - t.mean.transpose();
  Eigen::VectorXd var =
      centered.array().square().colwise().mean().transpose();
  t.std = var.array().sqrt().max(epsilon_floor);
  return t;
}

ZmuvTransform ZmuvTransform::identity(int dim) {
  ZmuvTransform t;
  t.mean = Eigen::VectorXd::Zero(dim);
  t.std = Eigen::VectorXd::Ones(dim);
  return t;
}

Eigen::MatrixXd ZmuvTransform::apply(
    const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  if (x.cols() != mean.size())
    throw ArgumentError("zmuv_apply: feature dimension mismatch");
  return (x.rowwise() - mean.transpose()).array().rowwise() /
         std.transpose().array();
}

Eigen::MatrixXd ZmuvTransform::invert(
    const Eigen::Ref<const Eigen::MatrixXd>& z) const {
  if (z.cols() != mean.size())
    throw ArgumentError("zmuv_invert: feature dimension mismatch");
  return (z.array().rowwise() * std.transpose().array()).rowwise() +
         mean.transpose().array();
}

}  // namespace nbflab
