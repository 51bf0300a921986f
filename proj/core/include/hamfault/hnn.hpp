#pragma once

#include "hamfault/mlp.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hamfault {

/// Canonical coordinates. dim(q) == dim(p); the pipeline uses one degree of freedom.
struct PhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;

  std::size_t dof() const { return static_cast<std::size_t>(q.size()); }
  /// Stacked state [q; p].
  Eigen::VectorXd stacked() const;
  static PhasePoint from_stacked(const Eigen::VectorXd& x);
};

struct TrainingPair {
  PhasePoint state;
  Eigen::VectorXd q_dot;
  Eigen::VectorXd p_dot;
};

/// Column-per-sample storage of (state, time-derivative) pairs. Rows are
/// [q; p] for `states` and [dq/dt; dp/dt] for `rates`.
class TrainingPairs {
 public:
  TrainingPairs() = default;
  TrainingPairs(Eigen::MatrixXd states, Eigen::MatrixXd rates);

  std::size_t size() const { return static_cast<std::size_t>(states_.cols()); }
  bool empty() const { return size() == 0; }
  std::size_t dof() const { return static_cast<std::size_t>(states_.rows() / 2); }

  const Eigen::MatrixXd& states() const { return states_; }
  const Eigen::MatrixXd& rates() const { return rates_; }

  TrainingPair at(std::size_t i) const;
  void push_back(const TrainingPair& pair);

  /// Columns selected by index, in the given order.
  TrainingPairs select(const std::vector<std::size_t>& columns) const;

 private:
  Eigen::MatrixXd states_;
  Eigen::MatrixXd rates_;
};

/// H_theta: a scalar network over the stacked canonical state.
class HamiltonianModel {
 public:
  HamiltonianModel() = default;
  explicit HamiltonianModel(MlpParams params);

  const MlpParams& params() const { return params_; }
  MlpParams& params() { return params_; }
  std::size_t dof() const { return params_.spec().input_dim() / 2; }

  bool operator==(const HamiltonianModel&) const = default;

 private:
  MlpParams params_;
};

struct HnnTrainConfig {
  std::vector<std::size_t> hidden = {200, 200};
  Activation activation = Activation::Tanh;
  std::size_t epochs = 300;
  std::size_t batch_size = 512;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  /// Early stop once an epoch's mean training loss falls below this value.
  double tolerance = 1e-4;

  void validate() const;
};

/// Thrown when training produces a non-finite loss.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

struct HnnTrainResult {
  HamiltonianModel model;
  std::vector<double> loss_history;  // mean mini-batch loss per epoch
  double final_loss = 0.0;           // full-set loss of the returned model
  std::size_t epochs_run = 0;
};

double hamiltonian(const HamiltonianModel& model, const PhasePoint& x);

/// (dH/dp, -dH/dq)
std::pair<Eigen::VectorXd, Eigen::VectorXd> symplectic_field(const HamiltonianModel& model,
                                                             const PhasePoint& x);
/// Batched form: columns of `states` are stacked [q; p]; returns stacked fields.
Eigen::MatrixXd symplectic_field_batch(const HamiltonianModel& model, const Eigen::MatrixXd& states);

/// Mean over pairs of ||dH/dp - dq/dt||^2 + ||dH/dq + dp/dt||^2.
double hnn_loss(const HamiltonianModel& model, const TrainingPairs& batch);

/// Loss and its parameter gradient (double backpropagation).
ParamGradient hnn_loss_gradient(const HamiltonianModel& model, const TrainingPairs& batch);

MlpSpec hnn_spec(std::size_t dof, const HnnTrainConfig& config);

HnnTrainResult train_hnn(const TrainingPairs& pairs, const HnnTrainConfig& config);

/// Classic RK4 on the learned symplectic field. Returns steps + 1 points.
std::vector<PhasePoint> integrate(const HamiltonianModel& model, const PhasePoint& x0, double dt,
                                  std::size_t steps);

nlohmann::json to_json(const HnnTrainConfig& config);
HnnTrainConfig hnn_config_from_json(const nlohmann::json& doc);

/// A trained per-sequence model together with its provenance.
struct HnnRecord {
  HamiltonianModel model;
  std::string sequence_id;
  std::string label;
  double final_loss = 0.0;
  HnnTrainConfig config;
};

nlohmann::json to_json(const HnnRecord& record);
HnnRecord hnn_record_from_json(const nlohmann::json& doc);

}  // namespace hamfault
