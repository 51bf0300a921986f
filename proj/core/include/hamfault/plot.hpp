#pragma once

#include "hamfault/evaluate.hpp"
#include "hamfault/hnn.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace hamfault {

/// Writes `<stem>.csv` (fpr,tpr,threshold) for single-curve reports, or
/// `<stem>-class<k>.csv` per class for multiclass reports, plus one `<stem>.svg`
/// with every curve and the AUC annotation. Returns the written paths.
std::vector<std::filesystem::path> emit_roc(const EvalReport& report, const std::filesystem::path& stem);

struct GridSpec {
  double q_min = -1.0;
  double q_max = 1.0;
  double p_min = -1.0;
  double p_max = 1.0;
  std::size_t q_steps = 50;
  std::size_t p_steps = 50;

  void validate() const;
};

/// Bounding box of the latent states widened by `margin` of its extent per side.
GridSpec grid_from_states(const Eigen::MatrixXd& states, std::size_t q_steps, std::size_t p_steps,
                          double margin = 0.1);

struct PortraitGrid {
  GridSpec spec;
  Eigen::VectorXd q;   // q_steps values
  Eigen::VectorXd p;   // p_steps values
  Eigen::MatrixXd h;   // p_steps x q_steps
  Eigen::MatrixXd dq;  // dq/dt
  Eigen::MatrixXd dp;  // dp/dt
};

PortraitGrid evaluate_portrait(const HamiltonianModel& model, const GridSpec& spec);

/// Grid CSV with header q,p,H,dq_dt,dp_dt (q varies fastest) and an SVG with
/// H contours, a field quiver and the given 2 x N paths drawn on top.
std::vector<std::filesystem::path> emit_phase_portrait(const HamiltonianModel& model, const GridSpec& spec,
                                                       const std::filesystem::path& stem,
                                                       const std::vector<Eigen::MatrixXd>& overlays = {});

struct SpeedPoint {
  std::string sequence_id;
  std::string label;
  double rotation_hz = 0.0;
  double mean_hamiltonian = 0.0;
};

/// Mean of H over the latent trajectory, evaluated on every `stride`-th state.
double mean_hamiltonian(const HamiltonianModel& model, const Eigen::MatrixXd& states, std::size_t stride = 1);

/// CSV (sequence_id,label,rotation_hz,mean_H) plus a scatter SVG.
std::vector<std::filesystem::path> emit_hamiltonian_vs_speed(const std::vector<SpeedPoint>& points,
                                                             const std::filesystem::path& stem);

}  // namespace hamfault
