#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nbflab/mlp.hpp"

namespace nbflab {

/// Adam with bias correction and the exponential learning-rate decay schedule:
/// lr is multiplied by decay_factor once per epoch starting at
/// decay_start_epoch. Moment accumulators are zero-initialized.
struct AdamState {
  long step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double decay_factor = 0.9;
  int decay_start_epoch = 70;

  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;
  int last_epoch = -1;

  static AdamState init(const MlpNetwork& net, double lr = 1e-3,
                        double decay_factor = 0.9, int decay_start_epoch = 70);

  /// Call at the start of each epoch (0-based, non-decreasing). Applies the
  /// decay factor once per epoch >= decay_start_epoch.
  void begin_epoch(int epoch);

  /// One bias-corrected update in place. Throws NumericalError on non-finite
  /// gradients. With zero gradients the parameters are unchanged.
  void step(MlpNetwork& net, const MlpGradients& grads);
};

}  // namespace nbflab
