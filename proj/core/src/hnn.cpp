#include "hamfault/hnn.hpp"

#include "hamfault/ode.hpp"
#include "hamfault/random.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hamfault {

Eigen::VectorXd PhasePoint::stacked() const {
  Eigen::VectorXd x(q.size() + p.size());
  x << q, p;
  return x;
}

PhasePoint PhasePoint::from_stacked(const Eigen::VectorXd& x) {
  if (x.size() % 2 != 0) throw std::invalid_argument("stacked phase state must have even length");
  const Eigen::Index n = x.size() / 2;
  return {x.head(n), x.tail(n)};
}

TrainingPairs::TrainingPairs(Eigen::MatrixXd states, Eigen::MatrixXd rates)
    : states_(std::move(states)), rates_(std::move(rates)) {
  if (states_.rows() % 2 != 0) throw std::invalid_argument("state rows must be [q; p]");
  if (states_.rows() != rates_.rows() || states_.cols() != rates_.cols()) {
    throw std::invalid_argument("states and rates must have matching shapes");
  }
  if (!states_.allFinite() || !rates_.allFinite()) {
    throw std::invalid_argument("training pairs contain non-finite entries");
  }
}

TrainingPair TrainingPairs::at(std::size_t i) const {
  const auto col = static_cast<Eigen::Index>(i);
  const auto n = static_cast<Eigen::Index>(dof());
  return {{states_.col(col).head(n), states_.col(col).tail(n)},
          rates_.col(col).head(n),
          rates_.col(col).tail(n)};
}

void TrainingPairs::push_back(const TrainingPair& pair) {
  const Eigen::Index n = pair.state.q.size();
  if (pair.state.p.size() != n || pair.q_dot.size() != n || pair.p_dot.size() != n) {
    throw std::invalid_argument("training pair has inconsistent dimensions");
  }
  if (!empty() && static_cast<std::size_t>(n) != dof()) {
    throw std::invalid_argument("training pair dimension differs from existing pairs");
  }
  const Eigen::Index cols = states_.cols();
  states_.conservativeResize(2 * n, cols + 1);
  rates_.conservativeResize(2 * n, cols + 1);
  states_.col(cols) << pair.state.q, pair.state.p;
  rates_.col(cols) << pair.q_dot, pair.p_dot;
}

TrainingPairs TrainingPairs::select(const std::vector<std::size_t>& columns) const {
  Eigen::MatrixXd s(states_.rows(), static_cast<Eigen::Index>(columns.size()));
  Eigen::MatrixXd r(rates_.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    s.col(static_cast<Eigen::Index>(j)) = states_.col(static_cast<Eigen::Index>(columns[j]));
    r.col(static_cast<Eigen::Index>(j)) = rates_.col(static_cast<Eigen::Index>(columns[j]));
  }
  TrainingPairs out;
  out.states_ = std::move(s);
  out.rates_ = std::move(r);
  return out;
}

HamiltonianModel::HamiltonianModel(MlpParams params) : params_(std::move(params)) {
  const auto& spec = params_.spec();
  if (spec.output_dim() != 1) throw std::invalid_argument("Hamiltonian network must have output dim 1");
  if (spec.input_dim() % 2 != 0) throw std::invalid_argument("Hamiltonian network input dim must be even");
}

void HnnTrainConfig::validate() const {
  if (epochs == 0 || batch_size == 0) throw std::invalid_argument("epochs and batch_size must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  for (auto h : hidden) {
    if (h == 0) throw std::invalid_argument("hidden layer sizes must be positive");
  }
}

namespace {

void check_state(const HamiltonianModel& model, const PhasePoint& x) {
  if (x.q.size() != x.p.size() || x.dof() != model.dof()) {
    throw std::invalid_argument("phase point dimension does not match the model");
  }
}

}  // namespace

double hamiltonian(const HamiltonianModel& model, const PhasePoint& x) {
  check_state(model, x);
  return forward(model.params(), x.stacked())(0);
}

Eigen::MatrixXd symplectic_field_batch(const HamiltonianModel& model, const Eigen::MatrixXd& states) {
  const Eigen::MatrixXd grad = input_gradient_batch(model.params(), states);
  const Eigen::Index n = grad.rows() / 2;
  Eigen::MatrixXd field(grad.rows(), grad.cols());
  field.topRows(n) = grad.bottomRows(n);
  field.bottomRows(n) = -grad.topRows(n);
  return field;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> symplectic_field(const HamiltonianModel& model,
                                                             const PhasePoint& x) {
  check_state(model, x);
  const Eigen::VectorXd field = symplectic_field_batch(model, x.stacked()).col(0);
  const Eigen::Index n = x.q.size();
  return {field.head(n), field.tail(n)};
}

namespace {

// dL/d(grad H) for the squared-residual loss, with residuals
// r_q = dH/dp - dq/dt and r_p = dH/dq + dp/dt.
GradientLoss make_hnn_loss(const Eigen::MatrixXd& rates) {
  return [&rates](const Eigen::MatrixXd& grad, Eigen::MatrixXd& d_grad) {
    const Eigen::Index n = grad.rows() / 2;
    const double inv = 1.0 / static_cast<double>(grad.cols());
    const Eigen::MatrixXd r_q = grad.bottomRows(n) - rates.topRows(n);
    const Eigen::MatrixXd r_p = grad.topRows(n) + rates.bottomRows(n);
    d_grad.topRows(n) = 2.0 * inv * r_p;
    d_grad.bottomRows(n) = 2.0 * inv * r_q;
    return inv * (r_q.squaredNorm() + r_p.squaredNorm());
  };
}

void check_batch(const HamiltonianModel& model, const TrainingPairs& batch) {
  if (batch.empty()) throw std::invalid_argument("hnn_loss: empty batch");
  if (batch.dof() != model.dof()) throw std::invalid_argument("batch dimension does not match the model");
}

}  // namespace

double hnn_loss(const HamiltonianModel& model, const TrainingPairs& batch) {
  check_batch(model, batch);
  const Eigen::MatrixXd field = symplectic_field_batch(model, batch.states());
  return (field - batch.rates()).squaredNorm() / static_cast<double>(batch.size());
}

ParamGradient hnn_loss_gradient(const HamiltonianModel& model, const TrainingPairs& batch) {
  check_batch(model, batch);
  return grad_loss_wrt_params(model.params(), batch.states(), make_hnn_loss(batch.rates()));
}

MlpSpec hnn_spec(std::size_t dof, const HnnTrainConfig& config) {
  MlpSpec spec;
  spec.layer_sizes.push_back(2 * dof);
  spec.layer_sizes.insert(spec.layer_sizes.end(), config.hidden.begin(), config.hidden.end());
  spec.layer_sizes.push_back(1);
  spec.activation = config.activation;
  spec.seed = config.seed;
  return spec;
}

HnnTrainResult train_hnn(const TrainingPairs& pairs, const HnnTrainConfig& config) {
  config.validate();
  if (pairs.empty()) throw std::invalid_argument("train_hnn: empty pair set");
  if (pairs.size() < 2 * config.batch_size) {
    throw std::invalid_argument("train_hnn: need at least 2*batch_size = " +
                                std::to_string(2 * config.batch_size) + " pairs, got " +
                                std::to_string(pairs.size()));
  }

  HnnTrainResult result;
  result.model = HamiltonianModel(init_params(hnn_spec(pairs.dof(), config)));
  MlpParams& params = result.model.params();
  AdamState adam(AdamConfig{.lr = config.learning_rate}, params.size());
  Rng rng(mix_seed(config.seed, 0x686e6eULL));

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> batch_idx;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                       order.begin() + static_cast<std::ptrdiff_t>(stop));
      const TrainingPairs batch = pairs.select(batch_idx);
      const ParamGradient g = hnn_loss_gradient(result.model, batch);
      if (!std::isfinite(g.loss)) {
        throw TrainingDiverged(epoch, "HNN training diverged at epoch " + std::to_string(epoch));
      }
      try {
        adam_step(adam, params.flat(), g.grad);
      } catch (const std::invalid_argument&) {
        throw TrainingDiverged(epoch, "HNN training produced non-finite gradients at epoch " +
                                          std::to_string(epoch));
      }
      loss_sum += g.loss;
      ++batches;
    }
    const double epoch_loss = loss_sum / static_cast<double>(batches);
    result.loss_history.push_back(epoch_loss);
    result.epochs_run = epoch + 1;
    if (epoch_loss < config.tolerance) break;
  }

  result.final_loss = hnn_loss(result.model, pairs);
  if (!std::isfinite(result.final_loss)) {
    throw TrainingDiverged(result.epochs_run, "HNN final loss is not finite");
  }
  return result;
}

std::vector<PhasePoint> integrate(const HamiltonianModel& model, const PhasePoint& x0, double dt,
                                  std::size_t steps) {
  check_state(model, x0);
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (steps == 0) throw std::invalid_argument("integrate: steps must be at least 1");
  const auto field = [&model](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return symplectic_field_batch(model, x).col(0);
  };
  std::vector<PhasePoint> out;
  out.reserve(steps + 1);
  Eigen::VectorXd x = x0.stacked();
  out.push_back(x0);
  for (std::size_t i = 1; i <= steps; ++i) {
    x = rk4_step(field, x, dt);
    if (!x.allFinite()) {
      throw std::runtime_error("integrate: non-finite state at step " + std::to_string(i));
    }
    out.push_back(PhasePoint::from_stacked(x));
  }
  return out;
}

nlohmann::json to_json(const HnnTrainConfig& config) {
  return {{"hidden", config.hidden},
          {"activation", std::string(to_string(config.activation))},
          {"epochs", config.epochs},
          {"batch_size", config.batch_size},
          {"learning_rate", config.learning_rate},
          {"seed", config.seed},
          {"tolerance", config.tolerance}};
}

HnnTrainConfig hnn_config_from_json(const nlohmann::json& doc) {
  HnnTrainConfig c;
  c.hidden = doc.value("hidden", c.hidden);
  c.activation = activation_from_string(doc.value("activation", std::string("tanh")));
  c.epochs = doc.value("epochs", c.epochs);
  c.batch_size = doc.value("batch_size", c.batch_size);
  c.learning_rate = doc.value("learning_rate", c.learning_rate);
  c.seed = doc.value("seed", c.seed);
  c.tolerance = doc.value("tolerance", c.tolerance);
  c.validate();
  return c;
}

nlohmann::json to_json(const HnnRecord& record) {
  nlohmann::json doc = to_json(record.model.params());
  doc["sequence_id"] = record.sequence_id;
  doc["label"] = record.label;
  doc["final_loss"] = record.final_loss;
  doc["config"] = to_json(record.config);
  return doc;
}

HnnRecord hnn_record_from_json(const nlohmann::json& doc) {
  HnnRecord r;
  r.model = HamiltonianModel(mlp_from_json(doc));
  r.sequence_id = doc.value("sequence_id", std::string());
  r.label = doc.value("label", std::string());
  r.final_loss = doc.value("final_loss", 0.0);
  if (doc.contains("config")) r.config = hnn_config_from_json(doc.at("config"));
  return r;
}

}  // namespace hamfault
