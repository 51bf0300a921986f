#include "hamfault/pipeline.hpp"

#include "hamfault/csv.hpp"
#include "hamfault/features.hpp"
#include "hamfault/parallel.hpp"
#include "hamfault/plot.hpp"
#include "hamfault/random.hpp"
#include "hamfault/split.hpp"
#include "hamfault/surrogate.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>

namespace hamfault {

namespace fs = std::filesystem;

void PipelineConfig::reseed(std::uint64_t master) {
  seed = master;
  surrogate.seed = mix_seed(master, 1);
  autoencoder.seed = mix_seed(master, 2);
  hnn.seed = mix_seed(master, 3);
  split_seed = mix_seed(master, 4);
  evaluation.seed = mix_seed(master, 5);
  evaluation.forest.seed = mix_seed(master, 6);
}

void PipelineConfig::validate() const {
  if (source == DataSource::Mafaulda && data_root.empty()) {
    throw std::invalid_argument("config: source 'mafaulda' needs a data root");
  }
  if (source == DataSource::Surrogate) {
    if (surrogate.sequences_per_class < 2) throw std::invalid_argument("config: sequences_per_class must be >= 2");
    if (!(surrogate.severity_min >= 0.0) || surrogate.severity_max < surrogate.severity_min) {
      throw std::invalid_argument("config: surrogate severity range is invalid");
    }
    if (!(surrogate.sample_rate > 0.0) || !(surrogate.duration > 0.0)) {
      throw std::invalid_argument("config: surrogate sample_rate and duration must be positive");
    }
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw std::invalid_argument("config: split ratio must lie in (0, 1)");
  if (workers == 0) throw std::invalid_argument("config: workers must be >= 1");
  if (derivatives.stride == 0) throw std::invalid_argument("config: derivative stride must be >= 1");
  if (!(derivatives.time_unit > 0.0)) throw std::invalid_argument("config: derivative time_unit must be positive");
  if (plots.grid_steps < 2) throw std::invalid_argument("config: plot grid_steps must be >= 2");
  if (plots.speed_stride == 0) throw std::invalid_argument("config: plot speed_stride must be >= 1");
  if (out_dir.empty()) throw std::invalid_argument("config: output directory is empty");
  autoencoder.validate();
  hnn.validate();
}

namespace {

std::string source_name(DataSource s) { return s == DataSource::Mafaulda ? "mafaulda" : "surrogate"; }

DataSource source_from_name(const std::string& s) {
  if (s == "mafaulda") return DataSource::Mafaulda;
  if (s == "surrogate") return DataSource::Surrogate;
  throw std::invalid_argument("unknown data source '" + s + "' (expected mafaulda or surrogate)");
}

}  // namespace

nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json source = {{"type", source_name(c.source)},
                           {"root", c.data_root},
                           {"sample_rate", c.load.sample_rate},
                           {"nominal_duration", c.load.nominal_duration},
                           {"column_map", c.load.column_map},
                           {"max_per_class", c.max_per_class}};
  nlohmann::json surrogate = {{"sequences_per_class", c.surrogate.sequences_per_class},
                              {"sample_rate", c.surrogate.sample_rate},
                              {"duration", c.surrogate.duration},
                              {"noise_std", c.surrogate.noise_std},
                              {"severity_min", c.surrogate.severity_min},
                              {"severity_max", c.surrogate.severity_max},
                              {"seed", c.surrogate.seed}};
  return {{"seed", c.seed},
          {"source", source},
          {"surrogate", surrogate},
          {"autoencoder", to_json(c.autoencoder)},
          {"derivatives", {{"stride", c.derivatives.stride}, {"time_unit", c.derivatives.time_unit}}},
          {"hnn", to_json(c.hnn)},
          {"evaluation", to_json(c.evaluation)},
          {"split", {{"ratio", c.split_ratio}, {"seed", c.split_seed}}},
          {"plots", {{"grid_steps", c.plots.grid_steps},
                     {"portraits_per_class", c.plots.portraits_per_class},
                     {"speed_stride", c.plots.speed_stride}}},
          {"out_dir", c.out_dir},
          {"workers", c.workers}};
}

namespace {

// Rejects keys the serialized form does not know, so typos fail loudly.
void check_keys(const nlohmann::json& doc, const nlohmann::json& reference, const std::string& where) {
  if (!doc.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  for (const auto& [key, value] : doc.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!reference.contains(key)) throw std::invalid_argument("config: unknown key '" + path + "'");
    if (value.is_object() && reference.at(key).is_object()) check_keys(value, reference.at(key), path);
  }
}

}  // namespace

PipelineConfig pipeline_config_from_json(const nlohmann::json& doc) {
  check_keys(doc, to_json(PipelineConfig{}), "");
  PipelineConfig c;
  c.reseed(doc.value("seed", std::uint64_t{0}));
  if (doc.contains("source")) {
    const auto& s = doc.at("source");
    c.source = source_from_name(s.value("type", std::string("surrogate")));
    c.data_root = s.value("root", c.data_root);
    c.load.sample_rate = s.value("sample_rate", c.load.sample_rate);
    c.load.nominal_duration = s.value("nominal_duration", c.load.nominal_duration);
    if (s.contains("column_map")) {
      const auto map = s.at("column_map").get<std::vector<std::size_t>>();
      if (map.size() != kChannelCount) throw std::invalid_argument("config: column_map needs 8 entries");
      std::copy(map.begin(), map.end(), c.load.column_map.begin());
    }
    c.max_per_class = s.value("max_per_class", c.max_per_class);
  }
  if (doc.contains("surrogate")) {
    const auto& s = doc.at("surrogate");
    c.surrogate.sequences_per_class = s.value("sequences_per_class", c.surrogate.sequences_per_class);
    c.surrogate.sample_rate = s.value("sample_rate", c.surrogate.sample_rate);
    c.surrogate.duration = s.value("duration", c.surrogate.duration);
    c.surrogate.noise_std = s.value("noise_std", c.surrogate.noise_std);
    c.surrogate.severity_min = s.value("severity_min", c.surrogate.severity_min);
    c.surrogate.severity_max = s.value("severity_max", c.surrogate.severity_max);
    c.surrogate.seed = s.value("seed", c.surrogate.seed);
  }
  if (doc.contains("autoencoder")) {
    nlohmann::json ae = to_json(c.autoencoder);
    ae.update(doc.at("autoencoder"));
    c.autoencoder = autoencoder_config_from_json(ae);
  }
  if (doc.contains("derivatives")) {
    const auto& d = doc.at("derivatives");
    c.derivatives.stride = d.value("stride", c.derivatives.stride);
    c.derivatives.time_unit = d.value("time_unit", c.derivatives.time_unit);
  }
  if (doc.contains("hnn")) {
    nlohmann::json hnn = to_json(c.hnn);
    hnn.update(doc.at("hnn"));
    c.hnn = hnn_config_from_json(hnn);
  }
  if (doc.contains("evaluation")) {
    nlohmann::json ev = to_json(c.evaluation);
    const auto& given = doc.at("evaluation");
    for (const char* key : {"logistic", "forest"}) {
      if (given.contains(key)) ev[key].update(given.at(key));
    }
    for (const char* key : {"smote_k", "pca_components", "standardize", "seed"}) {
      if (given.contains(key)) ev[key] = given.at(key);
    }
    c.evaluation = evaluation_config_from_json(ev);
  }
  if (doc.contains("split")) {
    c.split_ratio = doc.at("split").value("ratio", c.split_ratio);
    c.split_seed = doc.at("split").value("seed", c.split_seed);
  }
  if (doc.contains("plots")) {
    const auto& p = doc.at("plots");
    c.plots.grid_steps = p.value("grid_steps", c.plots.grid_steps);
    c.plots.portraits_per_class = p.value("portraits_per_class", c.plots.portraits_per_class);
    c.plots.speed_stride = p.value("speed_stride", c.plots.speed_stride);
  }
  c.out_dir = doc.value("out_dir", c.out_dir);
  c.workers = doc.value("workers", c.workers);
  return c;
}

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::Ingest: return "ingest";
    case Stage::TrainAutoencoder: return "train-ae";
    case Stage::Encode: return "encode";
    case Stage::TrainHnn: return "train-hnn";
    case Stage::Features: return "features";
    case Stage::Classify: return "classify";
    case Stage::Evaluate: return "evaluate";
    case Stage::Plot: return "plot";
  }
  return "unknown";
}

RunManifest RunManifest::open(const fs::path& out_dir, const PipelineConfig& config) {
  RunManifest m;
  m.path_ = out_dir / "run_manifest.json";
  if (fs::exists(m.path_)) {
    m.doc_ = nlohmann::json::parse(csv::read_file(m.path_));
    if (!m.doc_.contains("runs") || !m.doc_.at("runs").is_array()) {
      throw std::runtime_error(m.path_.string() + ": not a run manifest");
    }
  } else {
    m.doc_ = {{"runs", nlohmann::json::array()}};
  }
  m.doc_["runs"].push_back({{"config", to_json(config)}, {"stages", nlohmann::json::array()}});
  m.flush();
  return m;
}

const nlohmann::json& RunManifest::current_run() const { return doc_.at("runs").back().at("stages"); }

void RunManifest::append(const StageRecord& r) {
  nlohmann::json entry = {{"stage", r.stage}, {"status", r.status}, {"artifacts", r.artifacts},
                          {"seconds", r.seconds}};
  if (!r.error.empty()) entry["error"] = r.error;
  if (!r.details.empty()) entry["details"] = r.details;
  doc_["runs"].back()["stages"].push_back(entry);
  flush();
}

void RunManifest::flush() const { csv::write_file(path_, doc_.dump(2) + "\n"); }

namespace {

nlohmann::json read_json(const fs::path& path) {
  if (!fs::exists(path)) throw std::runtime_error("missing artifact " + path.string());
  return nlohmann::json::parse(csv::read_file(path));
}

void write_json(const fs::path& path, const nlohmann::json& doc) { csv::write_file(path, doc.dump(2) + "\n"); }

struct Context {
  const PipelineConfig& config;
  fs::path out;
  RunOptions options;
  StageRecord& record;

  void artifact(const fs::path& p) { record.artifacts.push_back(fs::relative(p, out).generic_string()); }
};

LoadOptions effective_load_options(const PipelineConfig& c) {
  LoadOptions o = c.load;
  if (c.source == DataSource::Surrogate) {
    o.sample_rate = c.surrogate.sample_rate;
    o.nominal_duration = c.surrogate.duration;
  }
  return o;
}

DatasetManifest read_manifest(const fs::path& out) { return manifest_from_json(read_json(out / "manifest.json")); }

// Raw states generated for each aggregated class; bearing classes cycle through their sub-states.
std::vector<std::string> surrogate_raw_labels(FaultClass cls) {
  std::vector<std::string> out;
  for (auto raw : kRawLabels) {
    if (aggregate_label(raw).cls == cls) out.emplace_back(raw);
  }
  return out;
}

std::string rotation_stem(double hz) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", hz);
  return buf;
}

DatasetManifest limit_per_class(DatasetManifest manifest, std::size_t cap) {
  if (cap == 0) return manifest;
  std::map<int, std::vector<ManifestEntry>> by_class;
  for (auto& e : manifest.entries) by_class[e.label.index()].push_back(e);
  std::vector<ManifestEntry> kept;
  for (auto& [cls, entries] : by_class) {
    if (entries.size() <= cap) {
      kept.insert(kept.end(), entries.begin(), entries.end());
      continue;
    }
    for (std::size_t i = 0; i < cap; ++i) kept.push_back(entries[i * entries.size() / cap]);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  manifest.entries = std::move(kept);
  return manifest;
}

void stage_ingest(Context& ctx) {
  const PipelineConfig& c = ctx.config;
  const fs::path manifest_path = ctx.out / "manifest.json";
  if (ctx.options.resume && fs::exists(manifest_path)) {
    ctx.record.status = "reused";
    ctx.artifact(manifest_path);
    return;
  }
  DatasetManifest manifest;
  if (c.source == DataSource::Mafaulda) {
    if (!fs::is_directory(c.data_root)) {
      throw std::runtime_error("data root '" + c.data_root + "' does not exist or is not a directory");
    }
    manifest = limit_per_class(scan_dataset(c.data_root), c.max_per_class);
  } else {
    const fs::path root = ctx.out / "data";
    fs::remove_all(root);
    const auto& s = c.surrogate;
    for (int k = 0; k < kClassCount; ++k) {
      const auto raws = surrogate_raw_labels(class_from_index(k));
      for (std::size_t i = 0; i < s.sequences_per_class; ++i) {
        SurrogateConfig sc;
        sc.raw_label = raws[i % raws.size()];
        sc.rotation_hz = kMinRotationHz + (kMaxRotationHz - kMinRotationHz) * (static_cast<double>(i) + 0.5) /
                                              static_cast<double>(s.sequences_per_class);
        sc.seed = mix_seed(s.seed, static_cast<std::uint64_t>(k) * 1'000'003 + i);
        Rng rng(mix_seed(sc.seed, 0x736576));
        sc.severity = rng.uniform(s.severity_min, s.severity_max);
        sc.noise_std = s.noise_std;
        sc.sample_rate = s.sample_rate;
        sc.duration = s.duration;
        const SequenceRecord seq = generate_surrogate_sequence(sc);
        save_sequence_csv(seq, root / sc.raw_label / (rotation_stem(sc.rotation_hz) + ".csv"));
      }
    }
    manifest = scan_dataset(root);
  }
  write_json(manifest_path, to_json(manifest));
  ctx.artifact(manifest_path);
  const auto counts = manifest.counts();
  for (int k = 0; k < kClassCount; ++k) {
    ctx.record.details["counts"][std::string(class_name(class_from_index(k)))] = counts[static_cast<std::size_t>(k)];
  }
  ctx.record.details["total"] = manifest.entries.size();
}

void stage_train_autoencoder(Context& ctx) {
  const fs::path model_path = ctx.out / "autoencoder.json";
  if (ctx.options.resume && fs::exists(model_path)) {
    ctx.record.status = "reused";
    ctx.artifact(model_path);
    return;
  }
  const DatasetManifest manifest = read_manifest(ctx.out);
  const LoadOptions load = effective_load_options(ctx.config);
  std::vector<SequenceRecord> normal;
  for (const auto& e : manifest.entries) {
    if (e.label.cls == FaultClass::Normal) normal.push_back(load_sequence(manifest, e, load));
  }
  if (normal.empty()) throw std::runtime_error("no Normal sequences in the manifest");
  const AutoencoderTrainResult result = train_autoencoder(normal, ctx.config.autoencoder);
  write_json(model_path, to_json(result.model));
  ctx.artifact(model_path);
  ctx.record.details["normal_sequences"] = normal.size();
  ctx.record.details["final_error"] = result.final_error;
  ctx.record.details["loss_history"] = result.loss_history;
}

fs::path latent_path(const fs::path& out, const ManifestEntry& e) { return out / "latent" / (e.sequence_id + ".csv"); }
fs::path hnn_path(const fs::path& out, const ManifestEntry& e) { return out / "hnn" / (e.sequence_id + ".json"); }

void stage_encode(Context& ctx) {
  const DatasetManifest manifest = read_manifest(ctx.out);
  const AutoencoderModel ae = autoencoder_from_json(read_json(ctx.out / "autoencoder.json"));
  const LoadOptions load = effective_load_options(ctx.config);
  std::size_t reused = 0;
  std::mutex m;
  parallel_for(manifest.entries.size(), ctx.config.workers, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    const fs::path path = latent_path(ctx.out, e);
    if (ctx.options.resume && fs::exists(path)) {
      std::lock_guard lock(m);
      ++reused;
      return;
    }
    write_latent_csv(encode_sequence(ae, load_sequence(manifest, e, load)), path);
  });
  for (const auto& e : manifest.entries) ctx.artifact(latent_path(ctx.out, e));
  ctx.record.details["reused"] = reused;
}

void stage_train_hnn(Context& ctx) {
  const DatasetManifest manifest = read_manifest(ctx.out);
  const auto& c = ctx.config;
  std::vector<double> losses(manifest.entries.size(), 0.0);
  std::vector<char> reused(manifest.entries.size(), 0);
  parallel_for(manifest.entries.size(), c.workers, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    const fs::path path = hnn_path(ctx.out, e);
    if (ctx.options.resume && fs::exists(path)) {
      losses[i] = hnn_record_from_json(read_json(path)).final_loss;
      reused[i] = 1;
      return;
    }
    const LatentTrajectory traj = read_latent_csv(latent_path(ctx.out, e));
    const TrainingPairs pairs = estimate_derivatives(traj, c.derivatives.stride, c.derivatives.time_unit);
    HnnTrainResult result;
    try {
      result = train_hnn(pairs, c.hnn);
    } catch (const TrainingDiverged& err) {
      throw std::runtime_error("sequence '" + e.sequence_id + "' diverged at epoch " + std::to_string(err.epoch()) +
                               ": " + err.what());
    } catch (const std::exception& err) {
      throw std::runtime_error("sequence '" + e.sequence_id + "': " + err.what());
    }
    HnnRecord record{result.model, e.sequence_id, e.raw_label, result.final_loss, c.hnn};
    write_json(path, to_json(record));
    losses[i] = result.final_loss;
  });
  std::size_t reused_count = 0;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    ctx.artifact(hnn_path(ctx.out, manifest.entries[i]));
    ctx.record.details["losses"][manifest.entries[i].sequence_id] = losses[i];
    reused_count += static_cast<std::size_t>(reused[i]);
  }
  ctx.record.details["reused"] = reused_count;
}

std::vector<HnnRecord> read_hnn_records(const fs::path& out, const DatasetManifest& manifest) {
  std::vector<HnnRecord> records;
  records.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) records.push_back(hnn_record_from_json(read_json(hnn_path(out, e))));
  return records;
}

void stage_features(Context& ctx) {
  const DatasetManifest manifest = read_manifest(ctx.out);
  const FeatureMatrix features = build_feature_matrix(read_hnn_records(ctx.out, manifest));
  const fs::path path = ctx.out / "features.csv";
  write_feature_csv(path, features);
  ctx.artifact(path);
  ctx.record.details["rows"] = features.size();
  ctx.record.details["dim"] = features.dim();
}

TaskSpec task_from_id(const std::string& id) {
  for (const auto& t : standard_tasks()) {
    if (t.id() == id) return t;
  }
  throw std::invalid_argument("unknown task id '" + id + "'");
}

void stage_classify(Context& ctx) {
  const auto& c = ctx.config;
  const FeatureMatrix features = read_feature_csv(ctx.out / "features.csv");
  const std::vector<int> labels = features.class_indices();
  const SplitIndices split = stratified_split(labels, c.split_ratio, c.split_seed);
  write_json(ctx.out / "split.json", to_json(split));
  ctx.artifact(ctx.out / "split.json");

  const ReducedFeatures reduced =
      reduce_features(features, split, c.evaluation.pca_components, c.evaluation.standardize);
  nlohmann::json pca_doc = to_json(reduced.pca);
  if (reduced.column_scale.size() > 0) {
    pca_doc["column_scale"] = std::vector<double>(reduced.column_scale.data(),
                                                  reduced.column_scale.data() + reduced.column_scale.size());
  }
  write_json(ctx.out / "pca.json", pca_doc);
  ctx.artifact(ctx.out / "pca.json");
  FeatureMatrix reduced_matrix{reduced.rows, features.labels, features.sequence_ids};
  write_feature_csv(ctx.out / "reduced.csv", reduced_matrix);
  ctx.artifact(ctx.out / "reduced.csv");
  ctx.record.details["pca_components"] = reduced.pca.rank();
  ctx.record.details["explained_variance_ratio"] = std::vector<double>(
      reduced.pca.explained_variance_ratio.data(),
      reduced.pca.explained_variance_ratio.data() + reduced.pca.explained_variance_ratio.size());

  EvaluationConfig ev = c.evaluation;
  ev.forest.workers = c.workers;
  for (const TaskSpec& task : standard_tasks()) {
    const TaskTraining training = train_task(task, reduced.rows, labels, split, ev);
    nlohmann::json doc = {{"task", task.id()}, {"skipped", !training.trained.has_value()}};
    if (training.trained) {
      doc["train_rows"] = training.trained->train_rows;
      doc["augmented_rows"] = training.trained->augmented_rows;
      doc["model"] = to_json(training.trained->model);
    } else {
      doc["reason"] = training.skip_reason;
    }
    const fs::path path = ctx.out / "models" / (task.id() + ".json");
    write_json(path, doc);
    ctx.artifact(path);
  }
}

void stage_evaluate(Context& ctx) {
  const FeatureMatrix reduced = read_feature_csv(ctx.out / "reduced.csv");
  const SplitIndices split = split_from_json(read_json(ctx.out / "split.json"));
  const std::vector<int> labels = reduced.class_indices();
  nlohmann::json summary = nlohmann::json::object();
  for (const TaskSpec& task : standard_tasks()) {
    const nlohmann::json doc = read_json(ctx.out / "models" / (task.id() + ".json"));
    EvalReport report;
    if (doc.at("skipped").get<bool>()) {
      report = skipped_report(task, doc.value("reason", std::string()));
    } else {
      TrainedTask trained{task_from_id(doc.at("task").get<std::string>()), classifier_from_json(doc.at("model")),
                          doc.at("train_rows").get<std::size_t>(), doc.at("augmented_rows").get<std::size_t>()};
      report = evaluate_task(trained, reduced.rows, labels, split);
    }
    const fs::path path = ctx.out / "reports" / (task.id() + ".json");
    write_json(path, to_json(report));
    ctx.artifact(path);
    if (report.skipped) {
      summary[task.id()] = {{"skipped", true}, {"reason", report.skip_reason}};
      continue;
    }
    for (const auto& p : emit_roc(report, ctx.out / "roc" / task.id())) ctx.artifact(p);
    summary[task.id()] = {{"auc", report.auc}, {"f1", report.f1}, {"test_size", report.test_size}};
  }
  write_json(ctx.out / "summary.json", summary);
  ctx.artifact(ctx.out / "summary.json");
  ctx.record.details = summary;
}

void stage_plot(Context& ctx) {
  const auto& c = ctx.config;
  const DatasetManifest manifest = read_manifest(ctx.out);
  std::array<std::size_t, kClassCount> drawn{};
  std::vector<SpeedPoint> speed;
  for (const auto& e : manifest.entries) {
    const HnnRecord record = hnn_record_from_json(read_json(hnn_path(ctx.out, e)));
    const LatentTrajectory traj = read_latent_csv(latent_path(ctx.out, e));
    auto& n = drawn[static_cast<std::size_t>(e.label.index())];
    if (n < c.plots.portraits_per_class) {
      ++n;
      const GridSpec grid = grid_from_states(traj.states, c.plots.grid_steps, c.plots.grid_steps);
      std::vector<Eigen::MatrixXd> overlays{traj.states};
      // Learned flow from the first latent state; 1000 steps span the recording.
      const double window = static_cast<double>(traj.size()) / traj.sample_rate / c.derivatives.time_unit;
      try {
        const auto path = integrate(record.model, PhasePoint::from_stacked(traj.states.col(0)), window / 1000.0, 1000);
        Eigen::MatrixXd flow(2, static_cast<Eigen::Index>(path.size()));
        for (std::size_t i = 0; i < path.size(); ++i) flow.col(static_cast<Eigen::Index>(i)) = path[i].stacked();
        overlays.push_back(std::move(flow));
      } catch (const std::runtime_error& err) {
        ctx.record.details["warnings"].push_back(e.sequence_id + ": " + err.what());
      }
      for (const auto& p : emit_phase_portrait(record.model, grid, ctx.out / "portraits" / e.sequence_id, overlays)) {
        ctx.artifact(p);
      }
    }
    if (e.rotation_hz) {
      speed.push_back({e.sequence_id, std::string(class_name(e.label.cls)), *e.rotation_hz,
                       mean_hamiltonian(record.model, traj.states, c.plots.speed_stride)});
    }
  }
  for (const auto& p : emit_hamiltonian_vs_speed(speed, ctx.out / "hamiltonian_vs_speed")) ctx.artifact(p);
}

}  // namespace

StageRecord run_stage(Stage stage, const PipelineConfig& config, RunManifest& manifest, const RunOptions& options) {
  StageRecord record;
  record.stage = stage_name(stage);
  record.status = "completed";
  Context ctx{config, fs::path(config.out_dir), options, record};
  const auto start = std::chrono::steady_clock::now();
  try {
    config.validate();
    fs::create_directories(ctx.out);
    switch (stage) {
      case Stage::Ingest: stage_ingest(ctx); break;
      case Stage::TrainAutoencoder: stage_train_autoencoder(ctx); break;
      case Stage::Encode: stage_encode(ctx); break;
      case Stage::TrainHnn: stage_train_hnn(ctx); break;
      case Stage::Features: stage_features(ctx); break;
      case Stage::Classify: stage_classify(ctx); break;
      case Stage::Evaluate: stage_evaluate(ctx); break;
      case Stage::Plot: stage_plot(ctx); break;
    }
  } catch (const std::exception& e) {
    record.status = "failed";
    record.error = e.what();
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest.append(record);
    throw StageError(stage, e.what());
  }
  record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.append(record);
  return record;
}

PipelineResult run_pipeline(const PipelineConfig& config, const RunOptions& options) {
  fs::create_directories(config.out_dir);
  RunManifest manifest = RunManifest::open(config.out_dir, config);
  PipelineResult result;
  for (Stage stage : kAllStages) result.stages.push_back(run_stage(stage, config, manifest, options));
  result.reports = load_reports(config.out_dir);
  return result;
}

std::vector<EvalReport> load_reports(const fs::path& out_dir) {
  std::vector<EvalReport> reports;
  for (const auto& task : standard_tasks()) {
    const fs::path path = out_dir / "reports" / (task.id() + ".json");
    if (fs::exists(path)) reports.push_back(eval_report_from_json(read_json(path)));
  }
  return reports;
}

}  // namespace hamfault
