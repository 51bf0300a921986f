#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hamfault {

enum class Activation { Tanh, Identity, Relu };

std::string_view to_string(Activation activation);
Activation activation_from_string(std::string_view name);

/// Twice-differentiable activations are the only ones allowed in losses that
/// consume input-gradients.
bool is_twice_differentiable(Activation activation);

struct MlpSpec {
  std::vector<std::size_t> layer_sizes;
  Activation activation = Activation::Tanh;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for fewer than two layers or a zero-size layer.
  void validate() const;

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }
  /// Number of affine maps (layer_sizes.size() - 1).
  std::size_t depth() const { return layer_sizes.size() - 1; }
  std::size_t parameter_count() const;

  bool operator==(const MlpSpec&) const = default;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense MLP parameters stored as one flat buffer. For each affine layer the
/// weight matrix (out x in, row-major) is followed by its bias vector. This
/// ordering is the serialization contract and the weight-space feature layout.
class MlpParams {
 public:
  MlpParams() = default;
  MlpParams(MlpSpec spec, std::vector<double> flat);

  static MlpParams zeros(const MlpSpec& spec);

  const MlpSpec& spec() const { return spec_; }
  std::size_t size() const { return data_.size(); }

  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }

  Eigen::Map<const RowMatrix> weight(std::size_t layer) const;
  Eigen::Map<RowMatrix> weight(std::size_t layer);
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
  Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);

  bool operator==(const MlpParams& other) const {
    return spec_ == other.spec_ && data_ == other.data_;
  }

 private:
  void compute_offsets();

  MlpSpec spec_;
  std::vector<double> data_;
  std::vector<std::size_t> weight_offsets_;
  std::vector<std::size_t> bias_offsets_;
};

/// Scaled-uniform weights in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases.
MlpParams init_params(const MlpSpec& spec);

std::vector<double> flatten(const MlpParams& params);
MlpParams unflatten(const MlpSpec& spec, std::span<const double> flat);

Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& x);
/// Columns of `inputs` are samples.
Eigen::MatrixXd forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs);

/// Gradient of a scalar-output network with respect to its input.
Eigen::VectorXd input_gradient(const MlpParams& params, const Eigen::VectorXd& x);
Eigen::MatrixXd input_gradient_batch(const MlpParams& params, const Eigen::MatrixXd& inputs);

struct ParamGradient {
  double loss = 0.0;
  std::vector<double> grad;  // flat, same ordering as MlpParams
};

/// A loss on the batch of input-gradients (n_in x batch). Returns the loss and
/// writes dLoss/dGradients (same shape) into the second argument.
using GradientLoss = std::function<double(const Eigen::MatrixXd&, Eigen::MatrixXd&)>;

/// Parameter gradient of a loss that consumes the network's input-gradient
/// (double backpropagation). Requires a scalar-output network with a
/// twice-differentiable activation.
ParamGradient grad_loss_wrt_params(const MlpParams& params, const Eigen::MatrixXd& inputs,
                                   const GradientLoss& loss_fn);

/// A loss on the network outputs (n_out x batch); same convention as GradientLoss.
using OutputLoss = std::function<double(const Eigen::MatrixXd&, Eigen::MatrixXd&)>;

struct BackpropResult {
  double loss = 0.0;
  std::vector<double> grad;       // dLoss/dParams, flat
  Eigen::MatrixXd input_grad;     // dLoss/dInputs, n_in x batch
};

/// Ordinary backpropagation of a loss on the outputs.
BackpropResult backprop(const MlpParams& params, const Eigen::MatrixXd& inputs,
                        const OutputLoss& loss_fn);

/// Vector-Jacobian product: given dLoss/dOutputs, returns parameter and input
/// gradients. Lets callers chain networks (encoder -> decoder).
BackpropResult backprop_outputs(const MlpParams& params, const Eigen::MatrixXd& inputs,
                                const Eigen::MatrixXd& output_grad);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  AdamState() = default;
  AdamState(AdamConfig cfg, std::size_t n) : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

/// Bias-corrected Adam update in place. Throws on non-finite gradients or a
/// shape mismatch, leaving params and state untouched.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

nlohmann::json to_json(const MlpParams& params);
MlpParams mlp_from_json(const nlohmann::json& doc);

}  // namespace hamfault
