#include "hamfault/csv.hpp"
#include "hamfault/dynamics.hpp"
#include "hamfault/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace hamfault;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;
  bool resume = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON pipeline configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out_dir, "Output directory (overrides the config)");
  cmd->add_option("--workers", flags.workers, "Worker threads for per-sequence stages")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags.seed, "Master seed; re-derives every stage seed");
  cmd->add_flag("--resume", flags.resume, "Reuse artifacts already present in the output directory");
}

PipelineConfig load_config(const CommonFlags& flags) {
  PipelineConfig config;
  if (!flags.config_path.empty()) {
    config = pipeline_config_from_json(nlohmann::json::parse(csv::read_file(flags.config_path)));
  }
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (flags.workers > 0) config.workers = flags.workers;
  if (flags.seed) config.reseed(*flags.seed);
  return config;
}

void print_reports(const std::vector<EvalReport>& reports) {
  std::printf("%-12s %-20s %8s %8s %6s\n", "task", "model", "auc", "f1", "test");
  for (const auto& r : reports) {
    if (r.skipped) {
      std::printf("%-12s skipped: %s\n", r.task_id.c_str(), r.skip_reason.c_str());
      continue;
    }
    std::printf("%-12s %-20s %8.4f %8.4f %6zu%s\n", r.task_id.c_str(), r.model_type.c_str(), r.auc, r.f1,
                r.test_size, r.f1_undefined ? "  (F1 had an undefined term)" : "");
  }
}

int run_stages(const CommonFlags& flags, std::initializer_list<Stage> stages,
               const std::function<void(PipelineConfig&)>& adjust = {}) {
  PipelineConfig config = load_config(flags);
  if (adjust) adjust(config);
  config.validate();
  fs::create_directories(config.out_dir);
  RunManifest manifest = RunManifest::open(config.out_dir, config);
  for (Stage s : stages) {
    const StageRecord r = run_stage(s, config, manifest, {flags.resume});
    std::printf("%-10s %-9s %7.2fs  %zu artifact(s)\n", r.stage.c_str(), r.status.c_str(), r.seconds,
                r.artifacts.size());
  }
  return 0;
}

int simulate_system(const CommonFlags& flags, const std::string& system, double zeta) {
  SimConfig sim;
  sim.mass = 1.0;
  sim.stiffness = 1.0;
  sim.damping_ratio = zeta;
  sim.seed = flags.seed.value_or(0);
  const SimResult result = system == "mass-spring" ? simulate_mass_spring(sim) : simulate_mass_spring_damper(sim);
  const fs::path out = flags.out_dir.empty() ? fs::path("run") : fs::path(flags.out_dir);
  Eigen::MatrixXd table(static_cast<Eigen::Index>(result.times.size()), 5);
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    table.row(r) << result.times[i], result.trajectory(0, r), result.trajectory(1, r), result.pairs.rates()(0, r),
        result.pairs.rates()(1, r);
  }
  const fs::path path = out / (system + ".csv");
  csv::write_matrix(path, {"t", "q", "p", "dq_dt", "dp_dt"}, table);
  std::printf("wrote %s (%zu samples)\n", path.string().c_str(), result.times.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamiltonian weight-space fault classification"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string root;
  auto* scan = app.add_subcommand("scan", "Scan a dataset tree and write manifest.json");
  add_common(scan, flags);
  scan->add_option("--root", root, "Dataset root (overrides the config)");

  std::string system = "surrogate";
  double zeta = 0.1;
  auto* simulate = app.add_subcommand("simulate", "Generate surrogate sequences or a reference trajectory");
  add_common(simulate, flags);
  simulate->add_option("--system", system, "surrogate | mass-spring | mass-spring-damper")
      ->check(CLI::IsMember({"surrogate", "mass-spring", "mass-spring-damper"}));
  simulate->add_option("--zeta", zeta, "Damping ratio for mass-spring-damper")->check(CLI::NonNegativeNumber);

  struct StageCommand {
    const char* name;
    const char* help;
    Stage stage;
  };
  const StageCommand stage_commands[] = {
      {"train-ae", "Train the autoencoder on Normal sequences", Stage::TrainAutoencoder},
      {"encode", "Encode every sequence into latent (q, p) trajectories", Stage::Encode},
      {"train-hnn", "Train one Hamiltonian network per sequence", Stage::TrainHnn},
      {"features", "Flatten network weights into features.csv", Stage::Features},
      {"classify", "Split, reduce with PCA, oversample and fit classifiers", Stage::Classify},
      {"evaluate", "Score classifiers on the test partition", Stage::Evaluate},
      {"plot", "Emit phase portraits and Hamiltonian-vs-speed plots", Stage::Plot},
  };
  std::vector<std::pair<CLI::App*, Stage>> stage_apps;
  for (const auto& sc : stage_commands) {
    auto* cmd = app.add_subcommand(sc.name, sc.help);
    add_common(cmd, flags);
    stage_apps.emplace_back(cmd, sc.stage);
  }
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage in order");
  add_common(pipeline, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (scan->parsed()) {
      return run_stages(flags, {Stage::Ingest}, [&](PipelineConfig& c) {
        c.source = DataSource::Mafaulda;
        if (!root.empty()) c.data_root = root;
      });
    }
    if (simulate->parsed()) {
      if (system != "surrogate") return simulate_system(flags, system, system == "mass-spring" ? 0.0 : zeta);
      return run_stages(flags, {Stage::Ingest}, [](PipelineConfig& c) { c.source = DataSource::Surrogate; });
    }
    for (const auto& [cmd, stage] : stage_apps) {
      if (!cmd->parsed()) continue;
      const int rc = run_stages(flags, {stage});
      if (stage == Stage::Evaluate) print_reports(load_reports(load_config(flags).out_dir));
      return rc;
    }
    if (pipeline->parsed()) {
      PipelineConfig config = load_config(flags);
      const PipelineResult result = run_pipeline(config, {flags.resume});
      for (const auto& r : result.stages) {
        std::printf("%-10s %-9s %7.2fs  %zu artifact(s)\n", r.stage.c_str(), r.status.c_str(), r.seconds,
                    r.artifacts.size());
      }
      print_reports(result.reports);
      return 0;
    }
  } catch (const StageError& e) {
    std::fprintf(stderr, "hamfault: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hamfault: configuration error: %s\n", e.what());
    return 1;
  }
  return 0;
}
