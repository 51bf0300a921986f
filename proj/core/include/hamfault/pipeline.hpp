#pragma once

#include "hamfault/coords.hpp"
#include "hamfault/evaluate.hpp"
#include "hamfault/hnn.hpp"
#include "hamfault/ingest.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace hamfault {

enum class DataSource { Mafaulda, Surrogate };

struct SurrogateSetConfig {
  std::size_t sequences_per_class = 10;
  double sample_rate = 5'000.0;
  double duration = 1.0;
  double noise_std = 0.05;
  double severity_min = 0.75;
  double severity_max = 1.25;
  std::uint64_t seed = 0;
};

struct DerivativeConfig {
  std::size_t stride = 50;
  /// Rates are expressed per `time_unit` seconds.
  double time_unit = 1.0;
};

struct PlotConfig {
  std::size_t grid_steps = 50;
  std::size_t portraits_per_class = 1;
  std::size_t speed_stride = 10;
};

struct PipelineConfig {
  DataSource source = DataSource::Surrogate;
  std::string data_root;  // dataset root (mafaulda source)
  LoadOptions load;
  /// Keeps at most this many entries per aggregated class, evenly spaced in
  /// manifest order. 0 keeps everything.
  std::size_t max_per_class = 0;
  SurrogateSetConfig surrogate;
  AutoencoderConfig autoencoder;
  DerivativeConfig derivatives;
  HnnTrainConfig hnn;
  EvaluationConfig evaluation;
  double split_ratio = 0.7;
  std::uint64_t split_seed = 0;
  PlotConfig plots;
  std::string out_dir = "run";
  std::size_t workers = 1;
  std::uint64_t seed = 0;

  /// Sets the master seed and derives every stage seed from it.
  void reseed(std::uint64_t master);
  void validate() const;
};

/// Top-level `seed` is applied first via reseed(); stage-level seeds given
/// explicitly in the document override the derived ones.
PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const PipelineConfig& config);

enum class Stage { Ingest, TrainAutoencoder, Encode, TrainHnn, Features, Classify, Evaluate, Plot };

inline constexpr Stage kAllStages[] = {Stage::Ingest,   Stage::TrainAutoencoder, Stage::Encode,
                                       Stage::TrainHnn, Stage::Features,         Stage::Classify,
                                       Stage::Evaluate, Stage::Plot};

std::string stage_name(Stage stage);

/// Failure of one stage; the message names the stage and the cause.
class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& cause)
      : std::runtime_error("stage '" + stage_name(stage) + "' failed: " + cause), stage_(stage), cause_(cause) {}
  Stage stage() const { return stage_; }
  const std::string& cause() const { return cause_; }

 private:
  Stage stage_;
  std::string cause_;
};

struct StageRecord {
  std::string stage;
  std::string status;  // completed | reused | failed
  std::vector<std::string> artifacts;  // relative to the output directory
  double seconds = 0.0;
  std::string error;
  nlohmann::json details = nlohmann::json::object();
};

/// `run_manifest.json` in the output directory. Each invocation appends one
/// run (config snapshot plus stage records); earlier runs are never modified.
class RunManifest {
 public:
  static RunManifest open(const std::filesystem::path& out_dir, const PipelineConfig& config);

  void append(const StageRecord& record);
  const nlohmann::json& document() const { return doc_; }
  /// Stage records of the current run.
  const nlohmann::json& current_run() const;

 private:
  std::filesystem::path path_;
  nlohmann::json doc_;
  void flush() const;
};

struct RunOptions {
  bool resume = false;
};

/// Runs one stage, reading its inputs from the output directory. Throws
/// StageError after recording the failure in the manifest.
StageRecord run_stage(Stage stage, const PipelineConfig& config, RunManifest& manifest,
                      const RunOptions& options = {});

struct PipelineResult {
  std::vector<StageRecord> stages;
  std::vector<EvalReport> reports;
};

/// All stages in order; the first failure stops the run (StageError).
PipelineResult run_pipeline(const PipelineConfig& config, const RunOptions& options = {});

/// Reads reports/<task>.json for the standard tasks present in the output directory.
std::vector<EvalReport> load_reports(const std::filesystem::path& out_dir);

}  // namespace hamfault
