#include "hamfault/coords.hpp"

#include "hamfault/csv.hpp"
#include "hamfault/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hamfault {

Eigen::MatrixXd AutoencoderModel::normalize(const Eigen::MatrixXd& samples) const {
  if (samples.rows() != mean.size()) {
    throw std::invalid_argument("expected " + std::to_string(mean.size()) + " channels, got " +
                                std::to_string(samples.rows()));
  }
  return ((samples.colwise() - mean).array().colwise() / stddev.array()).matrix();
}

Eigen::MatrixXd AutoencoderModel::encode(const Eigen::MatrixXd& samples) const {
  return forward_batch(encoder, normalize(samples));
}

Eigen::MatrixXd AutoencoderModel::decode(const Eigen::MatrixXd& latent) const {
  return forward_batch(decoder, latent);
}

double AutoencoderModel::reconstruction_error(const Eigen::MatrixXd& samples) const {
  const Eigen::MatrixXd x = normalize(samples);
  const Eigen::MatrixXd r = forward_batch(decoder, forward_batch(encoder, x));
  return (r - x).squaredNorm() / static_cast<double>(x.size());
}

void AutoencoderConfig::validate() const {
  if (latent_dim == 0 || epochs == 0 || batch_size == 0 || sample_stride == 0) {
    throw std::invalid_argument("autoencoder config: sizes and counts must be positive");
  }
  if (!(learning_rate > 0.0) || !(final_lr_fraction > 0.0)) {
    throw std::invalid_argument("autoencoder config: learning rates must be positive");
  }
}

namespace {

// Shared step between encoder and decoder: MSE over all normalized entries.
double ae_step(AutoencoderModel& ae, const Eigen::MatrixXd& x, AdamState& enc_state,
               AdamState& dec_state) {
  const Eigen::MatrixXd z = forward_batch(ae.encoder, x);
  const Eigen::MatrixXd r = forward_batch(ae.decoder, z);
  const double inv = 1.0 / static_cast<double>(x.size());
  const Eigen::MatrixXd d_out = 2.0 * inv * (r - x);
  const BackpropResult dec = backprop_outputs(ae.decoder, z, d_out);
  const BackpropResult enc = backprop_outputs(ae.encoder, x, dec.input_grad);
  adam_step(dec_state, ae.decoder.flat(), dec.grad);
  adam_step(enc_state, ae.encoder.flat(), enc.grad);
  return inv * (r - x).squaredNorm();
}

}  // namespace

AutoencoderTrainResult train_autoencoder(std::span<const SequenceRecord> normal_sequences,
                                         const AutoencoderConfig& config) {
  config.validate();
  if (normal_sequences.empty()) throw std::invalid_argument("train_autoencoder: no sequences");
  Eigen::Index channels = normal_sequences.front().channels.rows();
  Eigen::Index total = 0;
  for (const auto& seq : normal_sequences) {
    if (seq.label.cls != FaultClass::Normal) {
      throw std::invalid_argument("train_autoencoder: sequence '" + seq.sequence_id +
                                  "' is labeled " + std::string(class_name(seq.label.cls)) +
                                  "; the coordinate map is learned from normal data only");
    }
    if (seq.channels.rows() != channels) {
      throw std::invalid_argument("train_autoencoder: inconsistent channel counts");
    }
    total += (seq.channels.cols() + static_cast<Eigen::Index>(config.sample_stride) - 1) /
             static_cast<Eigen::Index>(config.sample_stride);
  }
  if (total < 2) throw std::invalid_argument("train_autoencoder: need at least 2 samples");

  Eigen::MatrixXd data(channels, total);
  Eigen::Index col = 0;
  for (const auto& seq : normal_sequences) {
    for (Eigen::Index s = 0; s < seq.channels.cols(); s += static_cast<Eigen::Index>(config.sample_stride)) {
      data.col(col++) = seq.channels.col(s);
    }
  }

  AutoencoderTrainResult result;
  AutoencoderModel& ae = result.model;
  ae.mean = data.rowwise().mean();
  const Eigen::MatrixXd centered = data.colwise() - ae.mean;
  ae.stddev = (centered.rowwise().squaredNorm() / static_cast<double>(total)).cwiseSqrt();
  for (Eigen::Index c = 0; c < channels; ++c) {
    if (!(ae.stddev(c) > 1e-12)) ae.stddev(c) = 1.0;
  }
  const Eigen::MatrixXd x = ae.normalize(data);

  MlpSpec enc_spec;
  enc_spec.layer_sizes.push_back(static_cast<std::size_t>(channels));
  enc_spec.layer_sizes.insert(enc_spec.layer_sizes.end(), config.hidden.begin(), config.hidden.end());
  enc_spec.layer_sizes.push_back(config.latent_dim);
  enc_spec.activation = config.activation;
  enc_spec.seed = config.seed;
  MlpSpec dec_spec = enc_spec;
  std::reverse(dec_spec.layer_sizes.begin(), dec_spec.layer_sizes.end());
  dec_spec.seed = mix_seed(config.seed, 1);
  ae.encoder = init_params(enc_spec);
  ae.decoder = init_params(dec_spec);

  AdamState enc_state(AdamConfig{.lr = config.learning_rate}, ae.encoder.size());
  AdamState dec_state(AdamConfig{.lr = config.learning_rate}, ae.decoder.size());
  const double decay =
      config.epochs > 1 ? std::pow(config.final_lr_fraction, 1.0 / static_cast<double>(config.epochs - 1))
                        : 1.0;

  Rng rng(mix_seed(config.seed, 2));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto batch = static_cast<Eigen::Index>(config.batch_size);
  Eigen::MatrixXd xb;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (Eigen::Index start = 0; start < total; start += batch) {
      const Eigen::Index n = std::min(batch, total - start);
      xb.resize(channels, n);
      for (Eigen::Index j = 0; j < n; ++j) xb.col(j) = x.col(order[static_cast<std::size_t>(start + j)]);
      loss_sum += ae_step(ae, xb, enc_state, dec_state);
      ++batches;
    }
    const double epoch_loss = loss_sum / static_cast<double>(batches);
    if (!std::isfinite(epoch_loss)) {
      throw std::runtime_error("autoencoder training diverged at epoch " + std::to_string(epoch));
    }
    result.loss_history.push_back(epoch_loss);
    enc_state.config.lr *= decay;
    dec_state.config.lr *= decay;
  }
  result.final_error = ae.reconstruction_error(data);
  return result;
}

LatentTrajectory encode_sequence(const AutoencoderModel& ae, const SequenceRecord& seq) {
  if (static_cast<std::size_t>(seq.channels.rows()) != ae.channels()) {
    throw std::invalid_argument("encode_sequence: sequence has " + std::to_string(seq.channels.rows()) +
                                " channels, autoencoder expects " + std::to_string(ae.channels()));
  }
  LatentTrajectory traj;
  traj.states = ae.encode(seq.channels);
  traj.sample_rate = seq.sample_rate;
  traj.sequence_id = seq.sequence_id;
  return traj;
}

TrainingPairs estimate_derivatives(const LatentTrajectory& traj, std::size_t stride, double time_unit) {
  if (traj.size() < 3) {
    throw std::invalid_argument("estimate_derivatives: need at least 3 states, got " +
                                std::to_string(traj.size()));
  }
  if (stride == 0) throw std::invalid_argument("estimate_derivatives: stride must be >= 1");
  if (!(traj.sample_rate > 0.0) || !(time_unit > 0.0)) {
    throw std::invalid_argument("estimate_derivatives: sample rate and time unit must be positive");
  }
  if (traj.states.rows() % 2 != 0) throw std::invalid_argument("latent dimension must be even");
  const Eigen::Index interior = traj.states.cols() - 2;
  const Eigen::Index kept = (interior + static_cast<Eigen::Index>(stride) - 1) / static_cast<Eigen::Index>(stride);
  const double scale = traj.sample_rate * 0.5 * time_unit;
  Eigen::MatrixXd states(traj.states.rows(), kept);
  Eigen::MatrixXd rates(traj.states.rows(), kept);
  for (Eigen::Index j = 0; j < kept; ++j) {
    const Eigen::Index i = 1 + j * static_cast<Eigen::Index>(stride);
    states.col(j) = traj.states.col(i);
    rates.col(j) = (traj.states.col(i + 1) - traj.states.col(i - 1)) * scale;
  }
  return TrainingPairs(std::move(states), std::move(rates));
}

nlohmann::json to_json(const AutoencoderModel& model) {
  return {{"encoder", to_json(model.encoder)},
          {"decoder", to_json(model.decoder)},
          {"mean", std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size())},
          {"stddev", std::vector<double>(model.stddev.data(), model.stddev.data() + model.stddev.size())}};
}

AutoencoderModel autoencoder_from_json(const nlohmann::json& doc) {
  AutoencoderModel m;
  m.encoder = mlp_from_json(doc.at("encoder"));
  m.decoder = mlp_from_json(doc.at("decoder"));
  const auto mean = doc.at("mean").get<std::vector<double>>();
  const auto sd = doc.at("stddev").get<std::vector<double>>();
  m.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  m.stddev = Eigen::Map<const Eigen::VectorXd>(sd.data(), static_cast<Eigen::Index>(sd.size()));
  if (m.mean.size() != m.stddev.size() ||
      static_cast<std::size_t>(m.mean.size()) != m.encoder.spec().input_dim()) {
    throw std::invalid_argument("autoencoder normalization does not match encoder input");
  }
  return m;
}

nlohmann::json to_json(const AutoencoderConfig& c) {
  return {{"hidden", c.hidden},
          {"latent_dim", c.latent_dim},
          {"activation", std::string(to_string(c.activation))},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"final_lr_fraction", c.final_lr_fraction},
          {"sample_stride", c.sample_stride},
          {"seed", c.seed}};
}

AutoencoderConfig autoencoder_config_from_json(const nlohmann::json& doc) {
  AutoencoderConfig c;
  c.hidden = doc.value("hidden", c.hidden);
  c.latent_dim = doc.value("latent_dim", c.latent_dim);
  c.activation = activation_from_string(doc.value("activation", std::string("tanh")));
  c.epochs = doc.value("epochs", c.epochs);
  c.batch_size = doc.value("batch_size", c.batch_size);
  c.learning_rate = doc.value("learning_rate", c.learning_rate);
  c.final_lr_fraction = doc.value("final_lr_fraction", c.final_lr_fraction);
  c.sample_stride = doc.value("sample_stride", c.sample_stride);
  c.seed = doc.value("seed", c.seed);
  c.validate();
  return c;
}

void write_latent_csv(const LatentTrajectory& traj, const std::filesystem::path& path) {
  std::string out = "t,q,p\n";
  for (Eigen::Index j = 0; j < traj.states.cols(); ++j) {
    out += csv::format(static_cast<double>(j) / traj.sample_rate);
    out += ',';
    out += csv::format(traj.states(0, j));
    out += ',';
    out += csv::format(traj.states(1, j));
    out += '\n';
  }
  csv::write_file(path, out);
}

LatentTrajectory read_latent_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_table(path);
  if (table.header.size() != 3 || table.header[0] != "t") {
    throw std::runtime_error(path.string() + ": expected header t,q,p");
  }
  LatentTrajectory traj;
  traj.sequence_id = path.stem().string();
  traj.states.resize(2, static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != 3) throw std::runtime_error(path.string() + ": malformed row " + std::to_string(r + 2));
    traj.states(0, static_cast<Eigen::Index>(r)) = csv::parse_cell(row[1], r + 2, 2);
    traj.states(1, static_cast<Eigen::Index>(r)) = csv::parse_cell(row[2], r + 2, 3);
  }
  if (table.rows.size() >= 2) {
    const double t1 = csv::parse_cell(table.rows[1][0], 3, 1);
    traj.sample_rate = std::round(1e6 / t1) / 1e6;
  }
  return traj;
}

}  // namespace hamfault
