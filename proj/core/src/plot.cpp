#include "hamfault/plot.hpp"

#include "hamfault/csv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hamfault {

namespace {

const std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                             "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed-size plot area mapping data coordinates onto SVG pixels.
class Canvas {
 public:
  Canvas(double x_min, double x_max, double y_min, double y_max)
      : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
    if (!(x_max_ > x_min_)) x_max_ = x_min_ + 1.0;
    if (!(y_max_ > y_min_)) y_max_ = y_min_ + 1.0;
  }

  double px(double x) const { return kLeft + (x - x_min_) / (x_max_ - x_min_) * kPlot; }
  double py(double y) const { return kTop + kPlot - (y - y_min_) / (y_max_ - y_min_) * kPlot; }

  void add(const std::string& element) {
    body_ += element;
    body_ += '\n';
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, double width = 2.0,
                const std::string& dash = "") {
    std::string d;
    for (const auto& [x, y] : pts) d += num(px(x)) + "," + num(py(y)) + " ";
    std::string el = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + num(width) + "\"";
    if (!dash.empty()) el += " stroke-dasharray=\"" + dash + "\"";
    add(el + " points=\"" + d + "\"/>");
  }

  void line(double x0, double y0, double x1, double y1, const std::string& color, double width = 1.0) {
    add("<line x1=\"" + num(px(x0)) + "\" y1=\"" + num(py(y0)) + "\" x2=\"" + num(px(x1)) + "\" y2=\"" +
        num(py(y1)) + "\" stroke=\"" + color + "\" stroke-width=\"" + num(width) + "\"/>");
  }

  void circle(double x, double y, double r, const std::string& color) {
    add("<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"" + num(r) + "\" fill=\"" + color +
        "\"/>");
  }

  std::string finish(const std::string& title, const std::string& x_label, const std::string& y_label) const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kSize) + "\" height=\"" +
                      num(kSize) + "\" viewBox=\"0 0 " + num(kSize) + " " + num(kSize) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kPlot) + "\" height=\"" +
           num(kPlot) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double fx = x_min_ + (x_max_ - x_min_) * i / 4.0;
      const double fy = y_min_ + (y_max_ - y_min_) * i / 4.0;
      out += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(kTop + kPlot + 16) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" + tick(fx) + "</text>\n";
      out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(fy) + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + tick(fy) + "</text>\n";
    }
    out += "<text x=\"" + num(kLeft + kPlot / 2) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
           "text-anchor=\"middle\">" + escape(title) + "</text>\n";
    out += "<text x=\"" + num(kLeft + kPlot / 2) + "\" y=\"" + num(kSize - 8) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + num(kTop + kPlot / 2) + "\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 16 " + num(kTop + kPlot / 2) + ")\">" +
           escape(y_label) + "</text>\n";
    out += body_;
    out += "</svg>\n";
    return out;
  }

  static constexpr double kSize = 520;
  static constexpr double kLeft = 70;
  static constexpr double kTop = 40;
  static constexpr double kPlot = 420;

 private:
  static std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

  double x_min_, x_max_, y_min_, y_max_;
  std::string body_;
};

std::string roc_csv(const RocCurve& curve) {
  std::string out = "fpr,tpr,threshold\n";
  for (const auto& p : curve.points) {
    out += csv::format(p.fpr) + "," + csv::format(p.tpr) + "," + csv::format(p.threshold) + "\n";
  }
  return out;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix) {
  return stem.parent_path() / (stem.filename().string() + suffix);
}

}  // namespace

std::vector<std::filesystem::path> emit_roc(const EvalReport& report, const std::filesystem::path& stem) {
  if (report.skipped || report.roc.empty()) {
    throw std::invalid_argument("emit_roc: report '" + report.task_id + "' has no ROC points");
  }
  std::vector<std::filesystem::path> written;
  Canvas canvas(0.0, 1.0, 0.0, 1.0);
  canvas.line(0.0, 0.0, 1.0, 1.0, "#999999");
  const bool multi = report.roc.size() > 1;
  for (std::size_t c = 0; c < report.roc.size(); ++c) {
    const RocCurve& curve = report.roc[c];
    const auto path = multi ? with_suffix(stem, "-class" + std::to_string(report.classes.at(c)) + ".csv")
                            : with_suffix(stem, ".csv");
    csv::write_file(path, roc_csv(curve));
    written.push_back(path);

    std::vector<std::pair<double, double>> pts;
    for (const auto& p : curve.points) pts.emplace_back(p.fpr, p.tpr);
    const std::string color = kPalette[c % kPalette.size()];
    canvas.polyline(pts, color);
    const std::string label = multi ? "class " + std::to_string(report.classes.at(c)) + " AUC=" + num(curve.auc)
                                    : "AUC=" + num(curve.auc);
    const double y = Canvas::kTop + Canvas::kPlot - 12 - 18.0 * static_cast<double>(report.roc.size() - 1 - c);
    canvas.add("<text x=\"" + num(Canvas::kLeft + Canvas::kPlot - 10) + "\" y=\"" + num(y) +
               "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\" fill=\"" + color + "\">" +
               escape(label) + "</text>");
  }
  std::string title = "ROC " + report.task_id;
  if (multi) title += " (macro AUC=" + num(report.auc) + ")";
  const auto svg = with_suffix(stem, ".svg");
  csv::write_file(svg, canvas.finish(title, "false positive rate", "true positive rate"));
  written.push_back(svg);
  return written;
}

void GridSpec::validate() const {
  if (!(q_max > q_min) || !(p_max > p_min)) throw std::invalid_argument("grid bounds must be increasing");
  if (!std::isfinite(q_min) || !std::isfinite(q_max) || !std::isfinite(p_min) || !std::isfinite(p_max)) {
    throw std::invalid_argument("grid bounds must be finite");
  }
  if (q_steps < 2 || p_steps < 2) throw std::invalid_argument("grid needs at least 2 steps per axis");
}

GridSpec grid_from_states(const Eigen::MatrixXd& states, std::size_t q_steps, std::size_t p_steps, double margin) {
  if (states.rows() != 2 || states.cols() == 0) throw std::invalid_argument("grid_from_states: expected 2 x N states");
  GridSpec g;
  g.q_steps = q_steps;
  g.p_steps = p_steps;
  auto bounds = [&](Eigen::Index row, double& lo, double& hi) {
    lo = states.row(row).minCoeff();
    hi = states.row(row).maxCoeff();
    double extent = hi - lo;
    if (!(extent > 0.0)) extent = std::max(1.0, std::abs(lo));
    lo -= margin * extent;
    hi += margin * extent;
  };
  bounds(0, g.q_min, g.q_max);
  bounds(1, g.p_min, g.p_max);
  g.validate();
  return g;
}

PortraitGrid evaluate_portrait(const HamiltonianModel& model, const GridSpec& spec) {
  spec.validate();
  if (model.dof() != 1) throw std::invalid_argument("phase portraits need a one-degree-of-freedom model");
  PortraitGrid g;
  g.spec = spec;
  const auto nq = static_cast<Eigen::Index>(spec.q_steps);
  const auto np = static_cast<Eigen::Index>(spec.p_steps);
  g.q = Eigen::VectorXd::LinSpaced(nq, spec.q_min, spec.q_max);
  g.p = Eigen::VectorXd::LinSpaced(np, spec.p_min, spec.p_max);
  Eigen::MatrixXd states(2, nq * np);
  for (Eigen::Index j = 0; j < np; ++j) {
    for (Eigen::Index i = 0; i < nq; ++i) states.col(j * nq + i) << g.q(i), g.p(j);
  }
  const Eigen::RowVectorXd h = forward_batch(model.params(), states).row(0);
  const Eigen::MatrixXd field = symplectic_field_batch(model, states);
  g.h.resize(np, nq);
  g.dq.resize(np, nq);
  g.dp.resize(np, nq);
  for (Eigen::Index j = 0; j < np; ++j) {
    for (Eigen::Index i = 0; i < nq; ++i) {
      g.h(j, i) = h(j * nq + i);
      g.dq(j, i) = field(0, j * nq + i);
      g.dp(j, i) = field(1, j * nq + i);
    }
  }
  return g;
}

namespace {

// Marching squares over one level; returns line segments in data coordinates.
std::vector<std::array<double, 4>> contour_segments(const PortraitGrid& g, double level) {
  std::vector<std::array<double, 4>> segs;
  auto lerp = [&](double a, double b, double va, double vb) {
    const double d = vb - va;
    return d == 0.0 ? 0.5 * (a + b) : a + (level - va) / d * (b - a);
  };
  for (Eigen::Index j = 0; j + 1 < g.h.rows(); ++j) {
    for (Eigen::Index i = 0; i + 1 < g.h.cols(); ++i) {
      const double q0 = g.q(i), q1 = g.q(i + 1), p0 = g.p(j), p1 = g.p(j + 1);
      const double v00 = g.h(j, i), v10 = g.h(j, i + 1), v11 = g.h(j + 1, i + 1), v01 = g.h(j + 1, i);
      // Edge crossings: bottom, right, top, left.
      std::vector<std::pair<double, double>> hits;
      if ((v00 < level) != (v10 < level)) hits.emplace_back(lerp(q0, q1, v00, v10), p0);
      if ((v10 < level) != (v11 < level)) hits.emplace_back(q1, lerp(p0, p1, v10, v11));
      if ((v01 < level) != (v11 < level)) hits.emplace_back(lerp(q0, q1, v01, v11), p1);
      if ((v00 < level) != (v01 < level)) hits.emplace_back(q0, lerp(p0, p1, v00, v01));
      if (hits.size() == 2) {
        segs.push_back({hits[0].first, hits[0].second, hits[1].first, hits[1].second});
      } else if (hits.size() == 4) {
        segs.push_back({hits[0].first, hits[0].second, hits[1].first, hits[1].second});
        segs.push_back({hits[2].first, hits[2].second, hits[3].first, hits[3].second});
      }
    }
  }
  return segs;
}

}  // namespace

std::vector<std::filesystem::path> emit_phase_portrait(const HamiltonianModel& model, const GridSpec& spec,
                                                       const std::filesystem::path& stem,
                                                       const std::vector<Eigen::MatrixXd>& overlays) {
  const PortraitGrid g = evaluate_portrait(model, spec);
  std::string table = "q,p,H,dq_dt,dp_dt\n";
  for (Eigen::Index j = 0; j < g.h.rows(); ++j) {
    for (Eigen::Index i = 0; i < g.h.cols(); ++i) {
      table += csv::format(g.q(i)) + "," + csv::format(g.p(j)) + "," + csv::format(g.h(j, i)) + "," +
               csv::format(g.dq(j, i)) + "," + csv::format(g.dp(j, i)) + "\n";
    }
  }
  const auto csv_path = with_suffix(stem, ".csv");
  csv::write_file(csv_path, table);

  Canvas canvas(spec.q_min, spec.q_max, spec.p_min, spec.p_max);
  const double h_min = g.h.minCoeff();
  const double h_max = g.h.maxCoeff();
  if (h_max > h_min) {
    constexpr int kLevels = 12;
    for (int l = 1; l < kLevels; ++l) {
      const double level = h_min + (h_max - h_min) * l / kLevels;
      for (const auto& s : contour_segments(g, level)) canvas.line(s[0], s[1], s[2], s[3], "#6baed6", 1.2);
    }
  }
  // Quiver on a coarser sub-grid, arrows scaled to the largest vector.
  const Eigen::Index step_q = std::max<Eigen::Index>(1, g.h.cols() / 15);
  const Eigen::Index step_p = std::max<Eigen::Index>(1, g.h.rows() / 15);
  const double max_norm = (g.dq.array().square() + g.dp.array().square()).sqrt().maxCoeff();
  if (max_norm > 0.0) {
    const double cell = 0.8 * std::min((spec.q_max - spec.q_min) * step_q / (g.h.cols() - 1),
                                       (spec.p_max - spec.p_min) * step_p / (g.h.rows() - 1));
    const double q_scale = Canvas::kPlot / (spec.q_max - spec.q_min);
    const double p_scale = Canvas::kPlot / (spec.p_max - spec.p_min);
    for (Eigen::Index j = 0; j < g.h.rows(); j += step_p) {
      for (Eigen::Index i = 0; i < g.h.cols(); i += step_q) {
        const double n = std::hypot(g.dq(j, i), g.dp(j, i));
        if (n == 0.0) continue;
        // Arrow length in pixels, direction in pixel space.
        const double len = cell * std::min(q_scale, p_scale) * n / max_norm;
        double ux = g.dq(j, i) * q_scale, uy = -g.dp(j, i) * p_scale;
        const double un = std::hypot(ux, uy);
        ux /= un;
        uy /= un;
        const double x0 = canvas.px(g.q(i)), y0 = canvas.py(g.p(j));
        const double x1 = x0 + ux * len, y1 = y0 + uy * len;
        const double hx = -ux * 4.0, hy = -uy * 4.0;
        canvas.add("<path d=\"M" + num(x0) + "," + num(y0) + " L" + num(x1) + "," + num(y1) + " M" +
                   num(x1 + hx - uy * 2.5) + "," + num(y1 + hy + ux * 2.5) + " L" + num(x1) + "," + num(y1) +
                   " L" + num(x1 + hx + uy * 2.5) + "," + num(y1 + hy - ux * 2.5) +
                   "\" stroke=\"#444444\" stroke-width=\"1\" fill=\"none\"/>");
      }
    }
  }
  for (std::size_t o = 0; o < overlays.size(); ++o) {
    const Eigen::MatrixXd& path = overlays[o];
    if (path.rows() != 2 || path.cols() == 0) continue;
    const Eigen::Index stride = std::max<Eigen::Index>(1, path.cols() / 2000);
    std::vector<std::pair<double, double>> pts;
    for (Eigen::Index c = 0; c < path.cols(); c += stride) pts.emplace_back(path(0, c), path(1, c));
    canvas.polyline(pts, kPalette[(o + 1) % kPalette.size()], 1.0);
  }
  const auto svg_path = with_suffix(stem, ".svg");
  csv::write_file(svg_path, canvas.finish("Phase portrait " + stem.filename().string(), "q", "p"));
  return {csv_path, svg_path};
}

double mean_hamiltonian(const HamiltonianModel& model, const Eigen::MatrixXd& states, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("mean_hamiltonian: stride must be positive");
  if (states.cols() == 0) throw std::invalid_argument("mean_hamiltonian: empty trajectory");
  const auto s = static_cast<Eigen::Index>(stride);
  const Eigen::Index n = (states.cols() + s - 1) / s;
  Eigen::MatrixXd picked(states.rows(), n);
  for (Eigen::Index c = 0; c < n; ++c) picked.col(c) = states.col(c * s);
  return forward_batch(model.params(), picked).mean();
}

std::vector<std::filesystem::path> emit_hamiltonian_vs_speed(const std::vector<SpeedPoint>& points,
                                                             const std::filesystem::path& stem) {
  std::string table = "sequence_id,label,rotation_hz,mean_H\n";
  for (const auto& pt : points) {
    table += pt.sequence_id + "," + pt.label + "," + csv::format(pt.rotation_hz) + "," +
             csv::format(pt.mean_hamiltonian) + "\n";
  }
  const auto csv_path = with_suffix(stem, ".csv");
  csv::write_file(csv_path, table);

  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  std::vector<std::string> labels;
  if (!points.empty()) {
    x_lo = y_lo = std::numeric_limits<double>::infinity();
    x_hi = y_hi = -std::numeric_limits<double>::infinity();
    for (const auto& pt : points) {
      x_lo = std::min(x_lo, pt.rotation_hz);
      x_hi = std::max(x_hi, pt.rotation_hz);
      y_lo = std::min(y_lo, pt.mean_hamiltonian);
      y_hi = std::max(y_hi, pt.mean_hamiltonian);
      if (std::find(labels.begin(), labels.end(), pt.label) == labels.end()) labels.push_back(pt.label);
    }
    const double dx = std::max(1e-9, x_hi - x_lo) * 0.05, dy = std::max(1e-9, y_hi - y_lo) * 0.05;
    x_lo -= dx;
    x_hi += dx;
    y_lo -= dy;
    y_hi += dy;
  }
  Canvas canvas(x_lo, x_hi, y_lo, y_hi);
  for (const auto& pt : points) {
    const auto idx = static_cast<std::size_t>(std::find(labels.begin(), labels.end(), pt.label) - labels.begin());
    canvas.circle(pt.rotation_hz, pt.mean_hamiltonian, 3.5, kPalette[idx % kPalette.size()]);
  }
  for (std::size_t l = 0; l < labels.size(); ++l) {
    canvas.add("<text x=\"" + num(Canvas::kLeft + 8) + "\" y=\"" + num(Canvas::kTop + 18 + 16.0 * l) +
               "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + kPalette[l % kPalette.size()] + "\">" +
               escape(labels[l]) + "</text>");
  }
  const auto svg_path = with_suffix(stem, ".svg");
  csv::write_file(svg_path, canvas.finish("Mean Hamiltonian vs rotation", "rotation frequency (Hz)", "mean H"));
  return {csv_path, svg_path};
}

}  // namespace hamfault
