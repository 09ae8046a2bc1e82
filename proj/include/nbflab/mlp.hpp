#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace nbflab {

enum class Activation : std::uint8_t { leaky_relu = 0, tanh = 1 };

/// Dense feedforward network with identity output layer. Hidden layers share
/// one activation. Weight layout: weights[l] maps layer l to layer l+1 and has
/// shape (layer_sizes[l+1] x layer_sizes[l]).
struct MlpNetwork {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Activation hidden_activation = Activation::leaky_relu;
  double leaky_slope = 0.01;
  std::uint64_t seed = 0;

  /// He-style uniform fan-in init for leaky-ReLU nets, Glorot-style for tanh.
  /// Biases start at zero. Same seed + architecture gives bitwise-identical
  /// weights.
  static MlpNetwork create(std::vector<int> layer_sizes, Activation activation,
                           double leaky_slope, std::uint64_t seed);

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int num_weight_layers() const { return static_cast<int>(weights.size()); }
  std::size_t parameter_count() const;
};

/// Per-layer parameter gradients, shaped like the network's weights/biases.
struct MlpGradients {
  std::vector<Eigen::MatrixXd> d_weights;
  std::vector<Eigen::VectorXd> d_biases;

  static MlpGradients zeros_like(const MlpNetwork& net);
  void add_scaled(const MlpGradients& other, double scale);
  bool all_finite() const;
};

/// Activations cached during a batch forward pass, reused by the backward
/// pass. acts[0] is the input batch; acts.back() the output.
struct MlpForwardCache {
  std::vector<Eigen::MatrixXd> acts;
  std::vector<Eigen::MatrixXd> pre_acts;
};

Eigen::VectorXd mlp_forward(const MlpNetwork& net, const Eigen::VectorXd& x);

/// Batch forward; rows of x are samples.
Eigen::MatrixXd mlp_forward_batch(const MlpNetwork& net,
                                  const Eigen::Ref<const Eigen::MatrixXd>& x);

const Eigen::MatrixXd& mlp_forward_cached(
    const MlpNetwork& net, const Eigen::Ref<const Eigen::MatrixXd>& x,
    MlpForwardCache& cache);

/// Reverse-mode pass from an output cotangent d_out (same shape as the batch
/// output). Overwrites grads.
void mlp_backward(const MlpNetwork& net, const MlpForwardCache& cache,
                  const Eigen::Ref<const Eigen::MatrixXd>& d_out,
                  MlpGradients& grads);

/// Scalar loss of the batch outputs. Must fill d_out with the exact gradient
/// of the returned scalar with respect to the outputs.
using BatchLossFn =
    std::function<double(const Eigen::MatrixXd& outputs, Eigen::MatrixXd& d_out)>;

/// Exact reverse-mode gradients of loss_fn over the batch. Throws
/// NumericalError (naming the first offending batch row) on non-finite loss.
double mlp_param_grad(const MlpNetwork& net,
                      const Eigen::Ref<const Eigen::MatrixXd>& x,
                      const BatchLossFn& loss_fn, MlpGradients& grads);

/// Mean squared error over all output entries against fixed targets.
BatchLossFn mse_loss(const Eigen::MatrixXd& targets);

/// Exact d(outputs)/d(inputs) at a single point, (output_dim x input_dim).
Eigen::MatrixXd mlp_input_jacobian(const MlpNetwork& net,
                                   const Eigen::VectorXd& x);

/// Batched input Jacobians: result[k](i, j) = d output_j / d input_k at sample
/// row i. One forward-mode sweep per input dimension.
std::vector<Eigen::MatrixXd> mlp_input_jacobian_batch(
    const MlpNetwork& net, const Eigen::Ref<const Eigen::MatrixXd>& x);

}  // namespace nbflab
