#include "hamfault/mlp.hpp"

#include "hamfault/random.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hamfault {

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  if (name == "relu") return Activation::Relu;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

bool is_twice_differentiable(Activation activation) {
  return activation == Activation::Tanh || activation == Activation::Identity;
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("MlpSpec needs at least 2 layers, got " +
                                std::to_string(layer_sizes.size()));
  }
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (layer_sizes[i] == 0) {
      throw std::invalid_argument("MlpSpec layer " + std::to_string(i) + " has size 0");
    }
  }
}

std::size_t MlpSpec::parameter_count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    count += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
  }
  return count;
}

MlpParams::MlpParams(MlpSpec spec, std::vector<double> flat)
    : spec_(std::move(spec)), data_(std::move(flat)) {
  spec_.validate();
  if (data_.size() != spec_.parameter_count()) {
    throw std::invalid_argument("flat parameter vector has " + std::to_string(data_.size()) +
                                " entries, spec expects " +
                                std::to_string(spec_.parameter_count()));
  }
  compute_offsets();
}

MlpParams MlpParams::zeros(const MlpSpec& spec) {
  spec.validate();
  return MlpParams(spec, std::vector<double>(spec.parameter_count(), 0.0));
}

void MlpParams::compute_offsets() {
  weight_offsets_.clear();
  bias_offsets_.clear();
  std::size_t offset = 0;
  for (std::size_t l = 0; l < spec_.depth(); ++l) {
    const std::size_t in = spec_.layer_sizes[l];
    const std::size_t out = spec_.layer_sizes[l + 1];
    weight_offsets_.push_back(offset);
    offset += in * out;
    bias_offsets_.push_back(offset);
    offset += out;
  }
}

Eigen::Map<const RowMatrix> MlpParams::weight(std::size_t layer) const {
  const auto rows = static_cast<Eigen::Index>(spec_.layer_sizes[layer + 1]);
  const auto cols = static_cast<Eigen::Index>(spec_.layer_sizes[layer]);
  return {data_.data() + weight_offsets_[layer], rows, cols};
}

Eigen::Map<RowMatrix> MlpParams::weight(std::size_t layer) {
  const auto rows = static_cast<Eigen::Index>(spec_.layer_sizes[layer + 1]);
  const auto cols = static_cast<Eigen::Index>(spec_.layer_sizes[layer]);
  return {data_.data() + weight_offsets_[layer], rows, cols};
}

Eigen::Map<const Eigen::VectorXd> MlpParams::bias(std::size_t layer) const {
  return {data_.data() + bias_offsets_[layer],
          static_cast<Eigen::Index>(spec_.layer_sizes[layer + 1])};
}

Eigen::Map<Eigen::VectorXd> MlpParams::bias(std::size_t layer) {
  return {data_.data() + bias_offsets_[layer],
          static_cast<Eigen::Index>(spec_.layer_sizes[layer + 1])};
}

MlpParams init_params(const MlpSpec& spec) {
  MlpParams params = MlpParams::zeros(spec);
  Rng rng(spec.seed);
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.layer_sizes[l]));
    auto w = params.weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-scale, scale);
    }
  }
  return params;
}

std::vector<double> flatten(const MlpParams& params) {
  return {params.flat().begin(), params.flat().end()};
}

MlpParams unflatten(const MlpSpec& spec, std::span<const double> flat) {
  return MlpParams(spec, std::vector<double>(flat.begin(), flat.end()));
}

namespace {

void check_input_rows(const MlpParams& params, Eigen::Index rows) {
  if (static_cast<std::size_t>(rows) != params.spec().input_dim()) {
    throw std::invalid_argument("input dimension " + std::to_string(rows) +
                                " does not match network input " +
                                std::to_string(params.spec().input_dim()));
  }
}

void check_scalar_output(const MlpParams& params) {
  if (params.spec().output_dim() != 1) {
    throw std::invalid_argument("input-gradient requires a scalar-output network, got output dim " +
                                std::to_string(params.spec().output_dim()));
  }
}

// Activation value and its first two derivatives, evaluated elementwise on
// the pre-activation z (or, for tanh, from the activation itself).
void activate(Activation act, const Eigen::MatrixXd& z, Eigen::MatrixXd& a) {
  switch (act) {
    case Activation::Tanh: a = z.array().tanh(); break;
    case Activation::Identity: a = z; break;
    case Activation::Relu: a = z.array().max(0.0); break;
  }
}

Eigen::MatrixXd first_derivative(Activation act, const Eigen::MatrixXd& z,
                                 const Eigen::MatrixXd& a) {
  switch (act) {
    case Activation::Tanh: return (1.0 - a.array().square()).matrix();
    case Activation::Identity: return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    case Activation::Relu: return (z.array() > 0.0).cast<double>().matrix();
  }
  return {};
}

Eigen::MatrixXd second_derivative(Activation act, const Eigen::MatrixXd& z,
                                  const Eigen::MatrixXd& a) {
  switch (act) {
    case Activation::Tanh: return (-2.0 * a.array() * (1.0 - a.array().square())).matrix();
    case Activation::Identity:
    case Activation::Relu: return Eigen::MatrixXd::Zero(z.rows(), z.cols());
  }
  return {};
}

// Hidden layers are indexed 1..L-1; index 0 holds the inputs.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre;   // z_l, l = 1..L
  std::vector<Eigen::MatrixXd> post;  // a_l, l = 0..L-1
  std::vector<Eigen::MatrixXd> d1;    // sigma'(z_l), l = 1..L-1
};

ForwardCache run_forward(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  const auto& spec = params.spec();
  const std::size_t depth = spec.depth();
  ForwardCache cache;
  cache.pre.resize(depth + 1);
  cache.post.resize(depth);
  cache.d1.resize(depth);
  cache.post[0] = inputs;
  for (std::size_t l = 0; l < depth; ++l) {
    Eigen::MatrixXd z = params.weight(l) * cache.post[l];
    z.colwise() += params.bias(l);
    if (l + 1 < depth) {
      activate(spec.activation, z, cache.post[l + 1]);
      cache.d1[l + 1] = first_derivative(spec.activation, z, cache.post[l + 1]);
    }
    cache.pre[l + 1] = std::move(z);
  }
  return cache;
}

// Reverse pass of a scalar output with unit seed: g_l = dOut/dz_l and
// delta_l = dOut/da_l. delta_0 is the input-gradient.
struct GradientCache {
  std::vector<Eigen::MatrixXd> g;      // l = 1..L
  std::vector<Eigen::MatrixXd> delta;  // l = 0..L-1
};

GradientCache run_input_backward(const MlpParams& params, const ForwardCache& fwd,
                                 Eigen::Index batch) {
  const std::size_t depth = params.spec().depth();
  GradientCache cache;
  cache.g.resize(depth + 1);
  cache.delta.resize(depth);
  cache.g[depth] = Eigen::MatrixXd::Ones(1, batch);
  for (std::size_t l = depth; l-- > 0;) {
    cache.delta[l] = params.weight(l).transpose() * cache.g[l + 1];
    if (l >= 1) cache.g[l] = fwd.d1[l].cwiseProduct(cache.delta[l]);
  }
  return cache;
}

void add_weight_grad(const MlpParams& params, std::vector<double>& grad, std::size_t layer,
                     const Eigen::MatrixXd& value) {
  const std::size_t offset =
      static_cast<std::size_t>(params.weight(layer).data() - params.flat().data());
  Eigen::Map<RowMatrix> target(grad.data() + offset, value.rows(), value.cols());
  target += value;
}

void add_bias_grad(const MlpParams& params, std::vector<double>& grad, std::size_t layer,
                   const Eigen::VectorXd& value) {
  const std::size_t offset =
      static_cast<std::size_t>(params.bias(layer).data() - params.flat().data());
  Eigen::Map<Eigen::VectorXd> target(grad.data() + offset, value.size());
  target += value;
}

}  // namespace

Eigen::MatrixXd forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  check_input_rows(params, inputs.rows());
  const auto& spec = params.spec();
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    Eigen::MatrixXd z = params.weight(l) * a;
    z.colwise() += params.bias(l);
    if (l + 1 < spec.depth()) {
      activate(spec.activation, z, a);
    } else {
      a = std::move(z);
    }
  }
  return a;
}

Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& x) {
  return forward_batch(params, x).col(0);
}

Eigen::MatrixXd input_gradient_batch(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  check_input_rows(params, inputs.rows());
  check_scalar_output(params);
  const ForwardCache fwd = run_forward(params, inputs);
  GradientCache bwd = run_input_backward(params, fwd, inputs.cols());
  return std::move(bwd.delta[0]);
}

Eigen::VectorXd input_gradient(const MlpParams& params, const Eigen::VectorXd& x) {
  return input_gradient_batch(params, x).col(0);
}

ParamGradient grad_loss_wrt_params(const MlpParams& params, const Eigen::MatrixXd& inputs,
                                   const GradientLoss& loss_fn) {
  check_input_rows(params, inputs.rows());
  check_scalar_output(params);
  const auto& spec = params.spec();
  if (!is_twice_differentiable(spec.activation)) {
    throw std::invalid_argument("double backpropagation needs a twice-differentiable activation, got " +
                                std::string(to_string(spec.activation)));
  }
  const std::size_t depth = spec.depth();
  const ForwardCache fwd = run_forward(params, inputs);
  const GradientCache bwd = run_input_backward(params, fwd, inputs.cols());

  ParamGradient out;
  out.grad.assign(params.size(), 0.0);
  Eigen::MatrixXd delta_bar(bwd.delta[0].rows(), bwd.delta[0].cols());
  delta_bar.setZero();
  out.loss = loss_fn(bwd.delta[0], delta_bar);

  // Adjoint of the gradient pass: walk it forward again (it ran output->input).
  std::vector<Eigen::MatrixXd> z_bar(depth + 1);
  for (std::size_t l = 0; l < depth; ++l) {
    // delta_l = W_l^T g_{l+1}
    add_weight_grad(params, out.grad, l, bwd.g[l + 1] * delta_bar.transpose());
    if (l + 1 < depth) {
      const Eigen::MatrixXd g_bar = params.weight(l) * delta_bar;
      // g_{l+1} = sigma'(z_{l+1}) * delta_{l+1}
      const Eigen::MatrixXd d2 =
          second_derivative(spec.activation, fwd.pre[l + 1], fwd.post[l + 1]);
      z_bar[l + 1] = g_bar.cwiseProduct(d2).cwiseProduct(bwd.delta[l + 1]);
      delta_bar = g_bar.cwiseProduct(fwd.d1[l + 1]);
    }
  }

  // Adjoint of the forward pass. The loss does not read the output value, so
  // the output pre-activation carries no adjoint of its own.
  Eigen::MatrixXd z_total;
  for (std::size_t l = depth - 1; l >= 1; --l) {
    if (l + 1 < depth) {
      const Eigen::MatrixXd a_bar = params.weight(l).transpose() * z_total;
      z_total = z_bar[l] + a_bar.cwiseProduct(fwd.d1[l]);
    } else {
      z_total = z_bar[l];
    }
    add_weight_grad(params, out.grad, l - 1, z_total * fwd.post[l - 1].transpose());
    add_bias_grad(params, out.grad, l - 1, z_total.rowwise().sum());
  }
  return out;
}

BackpropResult backprop_outputs(const MlpParams& params, const Eigen::MatrixXd& inputs,
                                const Eigen::MatrixXd& output_grad) {
  check_input_rows(params, inputs.rows());
  const std::size_t depth = params.spec().depth();
  if (static_cast<std::size_t>(output_grad.rows()) != params.spec().output_dim() ||
      output_grad.cols() != inputs.cols()) {
    throw std::invalid_argument("output gradient shape does not match network output");
  }
  const ForwardCache fwd = run_forward(params, inputs);
  BackpropResult out;
  out.grad.assign(params.size(), 0.0);
  Eigen::MatrixXd z_bar = output_grad;
  for (std::size_t l = depth; l >= 1; --l) {
    add_weight_grad(params, out.grad, l - 1, z_bar * fwd.post[l - 1].transpose());
    add_bias_grad(params, out.grad, l - 1, z_bar.rowwise().sum());
    Eigen::MatrixXd a_bar = params.weight(l - 1).transpose() * z_bar;
    if (l - 1 >= 1) {
      z_bar = a_bar.cwiseProduct(fwd.d1[l - 1]);
    } else {
      out.input_grad = std::move(a_bar);
    }
  }
  return out;
}

BackpropResult backprop(const MlpParams& params, const Eigen::MatrixXd& inputs,
                        const OutputLoss& loss_fn) {
  const Eigen::MatrixXd outputs = forward_batch(params, inputs);
  Eigen::MatrixXd output_grad = Eigen::MatrixXd::Zero(outputs.rows(), outputs.cols());
  const double loss = loss_fn(outputs, output_grad);
  BackpropResult out = backprop_outputs(params, inputs, output_grad);
  out.loss = loss;
  return out;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: shape mismatch between params, grads and moments");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw std::invalid_argument("adam_step: non-finite gradient at index " + std::to_string(i));
    }
  }
  const AdamConfig& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grads[i];
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

nlohmann::json to_json(const MlpParams& params) {
  const auto& spec = params.spec();
  nlohmann::json doc;
  doc["spec"] = {{"layer_sizes", spec.layer_sizes},
                 {"activation", std::string(to_string(spec.activation))},
                 {"seed", spec.seed}};
  doc["params"] = flatten(params);
  return doc;
}

MlpParams mlp_from_json(const nlohmann::json& doc) {
  MlpSpec spec;
  const auto& s = doc.at("spec");
  spec.layer_sizes = s.at("layer_sizes").get<std::vector<std::size_t>>();
  spec.activation = activation_from_string(s.at("activation").get<std::string>());
  spec.seed = s.at("seed").get<std::uint64_t>();
  return MlpParams(spec, doc.at("params").get<std::vector<double>>());
}

}  // namespace hamfault
