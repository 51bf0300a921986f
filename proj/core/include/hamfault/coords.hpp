#pragma once

#include "hamfault/hnn.hpp"
#include "hamfault/ingest.hpp"
#include "hamfault/mlp.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hamfault {

/// Encoder (channels -> 2) and mirrored decoder, over per-channel z-scored samples.
struct AutoencoderModel {
  MlpParams encoder;
  MlpParams decoder;
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  std::size_t channels() const { return static_cast<std::size_t>(mean.size()); }
  Eigen::MatrixXd normalize(const Eigen::MatrixXd& samples) const;
  /// Encodes column samples (raw units) into the latent space.
  Eigen::MatrixXd encode(const Eigen::MatrixXd& samples) const;
  /// Decodes latent columns back to normalized channel space.
  Eigen::MatrixXd decode(const Eigen::MatrixXd& latent) const;
  /// Mean squared error on normalized samples.
  double reconstruction_error(const Eigen::MatrixXd& samples) const;
};

struct AutoencoderConfig {
  std::vector<std::size_t> hidden = {64, 32};  // encoder hidden layers; decoder mirrors
  std::size_t latent_dim = 2;
  Activation activation = Activation::Tanh;
  std::size_t epochs = 200;
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  /// Learning rate decays geometrically to learning_rate * final_lr_fraction.
  double final_lr_fraction = 1.0;
  /// Every `sample_stride`-th sample of each sequence enters training.
  std::size_t sample_stride = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AutoencoderTrainResult {
  AutoencoderModel model;
  std::vector<double> loss_history;
  double final_error = 0.0;
};

/// Trains on Normal-labeled sequences only; any other label is a hard error.
AutoencoderTrainResult train_autoencoder(std::span<const SequenceRecord> normal_sequences,
                                         const AutoencoderConfig& config);

struct LatentTrajectory {
  Eigen::MatrixXd states;  // 2 x samples, rows (q, p) = (z1, z2)
  double sample_rate = 0.0;
  std::string sequence_id;

  std::size_t size() const { return static_cast<std::size_t>(states.cols()); }
};

LatentTrajectory encode_sequence(const AutoencoderModel& ae, const SequenceRecord& seq);

/// Central differences (x[i+1] - x[i-1]) * rate / 2 at interior samples,
/// keeping every `stride`-th one. Rates are per `time_unit` seconds.
TrainingPairs estimate_derivatives(const LatentTrajectory& traj, std::size_t stride,
                                   double time_unit = 1.0);

nlohmann::json to_json(const AutoencoderModel& model);
AutoencoderModel autoencoder_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AutoencoderConfig& config);
AutoencoderConfig autoencoder_config_from_json(const nlohmann::json& doc);

/// CSV with header t,q,p.
void write_latent_csv(const LatentTrajectory& traj, const std::filesystem::path& path);
LatentTrajectory read_latent_csv(const std::filesystem::path& path);

}  // namespace hamfault
