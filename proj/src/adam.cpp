#include "nbflab/adam.hpp"

#include <cmath>

#include "nbflab/errors.hpp"

namespace nbflab {

AdamState AdamState::init(const MlpNetwork& net, double lr, double decay_factor,
                          int decay_start_epoch) {
  AdamState s;
  s.lr = lr;
  s.decay_factor = decay_factor;
  s.decay_start_epoch = decay_start_epoch;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    s.m_weights.emplace_back(
        Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.v_weights.emplace_back(
        Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.m_biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    s.v_biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return s;
}

void AdamState::begin_epoch(int epoch) {
  for (int e = last_epoch + 1; e <= epoch; ++e)
    if (e >= decay_start_epoch) lr *= decay_factor;
  last_epoch = epoch;
}

void AdamState::step(MlpNetwork& net, const MlpGradients& grads) {
  if (!grads.all_finite())
    throw NumericalError("adam_step: non-finite gradient");
  ++step_count;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));

  auto update = [&](Eigen::MatrixXd& p, Eigen::MatrixXd& m, Eigen::MatrixXd& v,
                    const Eigen::MatrixXd& g) {
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    p.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  };

  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    update(net.weights[l], m_weights[l], v_weights[l], grads.d_weights[l]);
    Eigen::VectorXd& b = net.biases[l];
    Eigen::VectorXd& mb = m_biases[l];
    Eigen::VectorXd& vb = v_biases[l];
    const Eigen::VectorXd& gb = grads.d_biases[l];
    mb = beta1 * mb + (1.0 - beta1) * gb;
    vb = beta2 * vb + (1.0 - beta2) * gb.cwiseProduct(gb);
    b.array() -= lr * (mb.array() / bc1) / ((vb.array() / bc2).sqrt() + eps);
  }
}

}  // namespace nbflab
