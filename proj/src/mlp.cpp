#include "nbflab/mlp.hpp"

#include <cmath>
#include <string>

#include "nbflab/errors.hpp"
#include "nbflab/rng.hpp"

namespace nbflab {

namespace {

void check_input_dim(const MlpNetwork& net, Eigen::Index dim) {
  if (dim != net.input_dim())
    throw ArgumentError("mlp: input dimension " + std::to_string(dim) +
                        " does not match layer_sizes[0]=" +
                        std::to_string(net.input_dim()));
}

// Element activation and its derivative. The leaky-ReLU derivative at 0 is
// defined as the negative slope.
inline double act_value(Activation a, double slope, double z) {
  if (a == Activation::leaky_relu) return z > 0.0 ? z : slope * z;
  return std::tanh(z);
}

inline double act_deriv(Activation a, double slope, double z) {
  if (a == Activation::leaky_relu) return z > 0.0 ? 1.0 : slope;
  const double t = std::tanh(z);
  return 1.0 - t * t;
}

}  // namespace

MlpNetwork MlpNetwork::create(std::vector<int> layer_sizes,
                              Activation activation, double leaky_slope,
                              std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw ArgumentError("MlpNetwork: need at least input and output sizes");
  for (int s : layer_sizes)
    if (s <= 0) throw ArgumentError("MlpNetwork: layer sizes must be positive");
  if (activation == Activation::leaky_relu &&
      !(leaky_slope > 0.0 && std::isfinite(leaky_slope)))
    throw ArgumentError("MlpNetwork: leaky_relu slope must be finite positive");

  MlpNetwork net;
  net.layer_sizes = std::move(layer_sizes);
  net.hidden_activation = activation;
  net.leaky_slope = leaky_slope;
  net.seed = seed;

  Rng rng(seed);
  const int n_layers = static_cast<int>(net.layer_sizes.size()) - 1;
  net.weights.reserve(n_layers);
  net.biases.reserve(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    const int fan_in = net.layer_sizes[l];
    const int fan_out = net.layer_sizes[l + 1];
    const double bound = activation == Activation::leaky_relu
                             ? std::sqrt(6.0 / fan_in)
                             : std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        w(i, j) = uniform(rng, -bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

std::size_t MlpNetwork::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += static_cast<std::size_t>(weights[l].size()) +
         static_cast<std::size_t>(biases[l].size());
  return n;
}

MlpGradients MlpGradients::zeros_like(const MlpNetwork& net) {
  MlpGradients g;
  g.d_weights.reserve(net.weights.size());
  g.d_biases.reserve(net.biases.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    g.d_weights.emplace_back(
        Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.d_biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return g;
}

void MlpGradients::add_scaled(const MlpGradients& other, double scale) {
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    d_weights[l] += scale * other.d_weights[l];
    d_biases[l] += scale * other.d_biases[l];
  }
}

bool MlpGradients::all_finite() const {
  for (std::size_t l = 0; l < d_weights.size(); ++l)
    if (!d_weights[l].allFinite() || !d_biases[l].allFinite()) return false;
  return true;
}

Eigen::VectorXd mlp_forward(const MlpNetwork& net, const Eigen::VectorXd& x) {
  check_input_dim(net, x.size());
  Eigen::VectorXd a = x;
  const int last = net.num_weight_layers() - 1;
  for (int l = 0; l <= last; ++l) {
    Eigen::VectorXd z = net.weights[l] * a + net.biases[l];
    if (l == last) return z;
    a = z.unaryExpr([&](double v) {
      return act_value(net.hidden_activation, net.leaky_slope, v);
    });
  }
  return a;  // unreachable
}

Eigen::MatrixXd mlp_forward_batch(const MlpNetwork& net,
                                  const Eigen::Ref<const Eigen::MatrixXd>& x) {
  check_input_dim(net, x.cols());
  Eigen::MatrixXd a = x;
  const int last = net.num_weight_layers() - 1;
  for (int l = 0; l <= last; ++l) {
    Eigen::MatrixXd z = (a * net.weights[l].transpose()).rowwise() +
                        net.biases[l].transpose();
    if (l == last) return z;
    a = z.unaryExpr([&](double v) {
      return act_value(net.hidden_activation, net.leaky_slope, v);
    });
  }
  return a;  // unreachable
}

const Eigen::MatrixXd& mlp_forward_cached(
    const MlpNetwork& net, const Eigen::Ref<const Eigen::MatrixXd>& x,
    MlpForwardCache& cache) {
  check_input_dim(net, x.cols());
  const int n_layers = net.num_weight_layers();
  cache.acts.resize(n_layers + 1);
  cache.pre_acts.resize(n_layers);
  cache.acts[0] = x;
  for (int l = 0; l < n_layers; ++l) {
    cache.pre_acts[l] =
        (cache.acts[l] * net.weights[l].transpose()).rowwise() +
        net.biases[l].transpose();
    if (l == n_layers - 1) {
      cache.acts[l + 1] = cache.pre_acts[l];
    } else {
      cache.acts[l + 1] = cache.pre_acts[l].unaryExpr([&](double v) {
        return act_value(net.hidden_activation, net.leaky_slope, v);
      });
    }
  }
  return cache.acts.back();
}

void mlp_backward(const MlpNetwork& net, const MlpForwardCache& cache,
                  const Eigen::Ref<const Eigen::MatrixXd>& d_out,
                  MlpGradients& grads) {
  const int n_layers = net.num_weight_layers();
  grads.d_weights.resize(n_layers);
  grads.d_biases.resize(n_layers);
  Eigen::MatrixXd delta = d_out;
  for (int l = n_layers - 1; l >= 0; --l) {
    grads.d_weights[l].noalias() = delta.transpose() * cache.acts[l];
    grads.d_biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd dprev = delta * net.weights[l];
      delta = dprev.binaryExpr(cache.pre_acts[l - 1], [&](double g, double z) {
        return g * act_deriv(net.hidden_activation, net.leaky_slope, z);
      });
    }
  }
}

double mlp_param_grad(const MlpNetwork& net,
                      const Eigen::Ref<const Eigen::MatrixXd>& x,
                      const BatchLossFn& loss_fn, MlpGradients& grads) {
  MlpForwardCache cache;
  const Eigen::MatrixXd& y = mlp_forward_cached(net, x, cache);
  Eigen::MatrixXd d_out(y.rows(), y.cols());
  const double loss = loss_fn(y, d_out);
  if (!std::isfinite(loss)) {
    Eigen::Index bad = 0;
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      if (!y.row(i).allFinite() || !d_out.row(i).allFinite()) {
        bad = i;
        break;
      }
    throw NumericalError("mlp_param_grad: non-finite loss at batch index " +
                         std::to_string(bad));
  }
  mlp_backward(net, cache, d_out, grads);
  return loss;
}

BatchLossFn mse_loss(const Eigen::MatrixXd& targets) {
  return [targets](const Eigen::MatrixXd& y, Eigen::MatrixXd& d_out) {
    const double inv_n = 1.0 / static_cast<double>(y.size());
    Eigen::MatrixXd diff = y - targets;
    d_out = 2.0 * inv_n * diff;
    return diff.squaredNorm() * inv_n;
  };
}

Eigen::MatrixXd mlp_input_jacobian(const MlpNetwork& net,
                                   const Eigen::VectorXd& x) {
  check_input_dim(net, x.size());
  const int last = net.num_weight_layers() - 1;
  Eigen::VectorXd a = x;
  Eigen::MatrixXd jac =
      Eigen::MatrixXd::Identity(net.input_dim(), net.input_dim());
  for (int l = 0; l <= last; ++l) {
    Eigen::VectorXd z = net.weights[l] * a + net.biases[l];
    Eigen::MatrixXd jz = net.weights[l] * jac;
    if (l == last) return jz;
    Eigen::VectorXd dz = z.unaryExpr([&](double v) {
      return act_deriv(net.hidden_activation, net.leaky_slope, v);
    });
    jac = dz.asDiagonal() * jz;
    a = z.unaryExpr([&](double v) {
      return act_value(net.hidden_activation, net.leaky_slope, v);
    });
  }
  return jac;  // unreachable
}

std::vector<Eigen::MatrixXd> mlp_input_jacobian_batch(
    const MlpNetwork& net, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  check_input_dim(net, x.cols());
  const int n_layers = net.num_weight_layers();
  const int in_dim = net.input_dim();
  const Eigen::Index n = x.rows();

  // Shared forward pass storing activation derivatives per hidden layer.
  std::vector<Eigen::MatrixXd> act_derivs(n_layers - 1);
  Eigen::MatrixXd a = x;
  for (int l = 0; l < n_layers - 1; ++l) {
    Eigen::MatrixXd z = (a * net.weights[l].transpose()).rowwise() +
                        net.biases[l].transpose();
    act_derivs[l] = z.unaryExpr([&](double v) {
      return act_deriv(net.hidden_activation, net.leaky_slope, v);
    });
    a = z.unaryExpr([&](double v) {
      return act_value(net.hidden_activation, net.leaky_slope, v);
    });
  }

  std::vector<Eigen::MatrixXd> result(in_dim);
  for (int k = 0; k < in_dim; ++k) {
    Eigen::MatrixXd tangent =
        Eigen::MatrixXd::Zero(n, in_dim);
    tangent.col(k).setOnes();
    for (int l = 0; l < n_layers; ++l) {
      Eigen::MatrixXd tz = tangent * net.weights[l].transpose();
      if (l == n_layers - 1) {
        tangent = std::move(tz);
      } else {
        tangent = tz.cwiseProduct(act_derivs[l]);
      }
    }
    result[k] = std::move(tangent);
  }
  return result;
}

}  // namespace nbflab
