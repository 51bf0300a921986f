#include "hamfault/ingest.hpp"

#include "hamfault/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace fs = std::filesystem;

namespace hamfault {

std::array<std::size_t, kClassCount> DatasetManifest::counts() const {
  std::array<std::size_t, kClassCount> out{};
  for (const auto& e : entries) out[static_cast<std::size_t>(e.label.index())] += 1;
  return out;
}

fs::path DatasetManifest::resolve(const ManifestEntry& entry) const {
  return fs::path(root) / entry.path;
}

std::optional<double> parse_rotation(std::string_view stem) {
  double value = 0.0;
  const auto result = std::from_chars(stem.data(), stem.data() + stem.size(), value);
  if (stem.empty() || result.ec != std::errc() || result.ptr != stem.data() + stem.size()) {
    return std::nullopt;
  }
  return value;
}

namespace {

std::vector<fs::path> csv_files_under(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string make_sequence_id(const fs::path& relative) {
  std::string id = relative.generic_string();
  if (id.size() > 4 && id.ends_with(".csv")) id.resize(id.size() - 4);
  std::string out;
  for (char c : id) {
    if (c == '/') {
      out += "__";
    } else {
      out += c;
    }
  }
  return out;
}

void add_files(DatasetManifest& manifest, const fs::path& root, const fs::path& dir,
               const std::string& raw_label) {
  const ClassLabel label = aggregate_label(raw_label);
  for (const auto& file : csv_files_under(dir)) {
    ManifestEntry e;
    const fs::path rel = fs::relative(file, root);
    e.path = rel.generic_string();
    e.raw_label = raw_label;
    e.label = label;
    e.rotation_hz = parse_rotation(file.stem().string());
    e.sequence_id = make_sequence_id(rel);
    manifest.entries.push_back(std::move(e));
  }
}

}  // namespace

DatasetManifest scan_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw std::runtime_error("dataset root is not a readable directory: " + root.string());
  }
  DatasetManifest manifest;
  manifest.root = root.string();

  std::vector<fs::path> top;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) top.push_back(entry.path());
  }
  std::sort(top.begin(), top.end());

  for (const auto& dir : top) {
    const std::string name = dir.filename().string();
    if (name == "underhang" || name == "overhang") {
      std::vector<fs::path> subs;
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) subs.push_back(entry.path());
      }
      std::sort(subs.begin(), subs.end());
      for (const auto& sub : subs) {
        const std::string raw = name + "/" + sub.filename().string();
        try {
          (void)aggregate_label(raw);
        } catch (const std::invalid_argument&) {
          throw std::runtime_error("unknown bearing fault directory: " + sub.string());
        }
        add_files(manifest, root, sub, raw);
      }
    } else if (name == "normal" || name == "imbalance" || name == "horizontal-misalignment" ||
               name == "vertical-misalignment") {
      add_files(manifest, root, dir, name);
    } else {
      throw std::runtime_error("unknown label directory: " + dir.string());
    }
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  return manifest;
}

SequenceRecord load_sequence(const fs::path& path, const LoadOptions& options) {
  for (std::size_t c : options.column_map) {
    if (c >= kChannelCount) throw std::invalid_argument("column map entry out of range");
  }
  const std::string text = csv::read_file(path);
  std::vector<double> values;
  values.reserve(text.size() / 10);
  std::size_t rows = 0;
  std::string_view rest(text);
  std::array<double, kChannelCount> row_values{};
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view() : rest.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    ++rows;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view cell = line.substr(start, comma == std::string_view::npos
                                                           ? std::string_view::npos
                                                           : comma - start);
      if (col >= kChannelCount) {
        const std::size_t cols = csv::split(line).size();
        throw std::runtime_error(path.string() + ": expected 8 columns, found " +
                                 std::to_string(cols) + " at row " + std::to_string(rows));
      }
      const double v = csv::parse_cell(cell, rows, col + 1);
      if (!std::isfinite(v)) {
        throw std::runtime_error(path.string() + ": non-finite value at row " +
                                 std::to_string(rows) + ", column " + std::to_string(col + 1));
      }
      row_values[col++] = v;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (col != kChannelCount) {
      throw std::runtime_error(path.string() + ": expected 8 columns, found " +
                               std::to_string(col) + " at row " + std::to_string(rows));
    }
    values.insert(values.end(), row_values.begin(), row_values.end());
  }
  if (rows == 0) throw std::runtime_error(path.string() + ": empty file");

  SequenceRecord record;
  record.sample_rate = options.sample_rate;
  record.source_path = path.string();
  record.channels.resize(static_cast<Eigen::Index>(kChannelCount), static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      record.channels(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) =
          values[r * kChannelCount + options.column_map[c]];
    }
  }
  const double expected = options.sample_rate * options.nominal_duration;
  if (std::abs(static_cast<double>(rows) - expected) > 1.0) {
    record.warnings.push_back("sample count " + std::to_string(rows) + " differs from nominal " +
                              std::to_string(static_cast<long long>(expected)));
  }
  record.sequence_id = path.stem().string();
  record.rotation_hz = parse_rotation(path.stem().string());
  return record;
}

SequenceRecord load_sequence(const DatasetManifest& manifest, const ManifestEntry& entry,
                             const LoadOptions& options) {
  SequenceRecord record = load_sequence(manifest.resolve(entry), options);
  record.label = entry.label;
  record.sequence_id = entry.sequence_id;
  record.rotation_hz = entry.rotation_hz;
  return record;
}

void save_sequence_csv(const SequenceRecord& record, const fs::path& path) {
  if (static_cast<std::size_t>(record.channels.rows()) != kChannelCount) {
    throw std::invalid_argument("sequence must have 8 channels");
  }
  std::string out;
  out.reserve(static_cast<std::size_t>(record.channels.cols()) * kChannelCount * 12);
  for (Eigen::Index s = 0; s < record.channels.cols(); ++s) {
    for (Eigen::Index c = 0; c < record.channels.rows(); ++c) {
      if (c) out += ',';
      out += csv::format(record.channels(c, s));
    }
    out += '\n';
  }
  csv::write_file(path, out);
}

nlohmann::json to_json(const DatasetManifest& manifest) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::json j = {{"path", e.path},
                        {"raw_label", e.raw_label},
                        {"label", std::string(class_name(e.label.cls))},
                        {"class_index", e.label.index()},
                        {"sequence_id", e.sequence_id}};
    j["rotation_hz"] = e.rotation_hz ? nlohmann::json(*e.rotation_hz) : nlohmann::json(nullptr);
    entries.push_back(std::move(j));
  }
  nlohmann::json counts;
  const auto c = manifest.counts();
  std::size_t total = 0;
  for (FaultClass cls : kAllClasses) {
    counts[std::string(class_name(cls))] = c[static_cast<std::size_t>(cls)];
    total += c[static_cast<std::size_t>(cls)];
  }
  counts["total"] = total;
  return {{"root", manifest.root}, {"entries", entries}, {"counts", counts}};
}

DatasetManifest manifest_from_json(const nlohmann::json& doc) {
  DatasetManifest m;
  m.root = doc.at("root").get<std::string>();
  for (const auto& j : doc.at("entries")) {
    ManifestEntry e;
    e.path = j.at("path").get<std::string>();
    e.raw_label = j.at("raw_label").get<std::string>();
    e.label = aggregate_label(e.raw_label);
    e.sequence_id = j.at("sequence_id").get<std::string>();
    if (j.contains("rotation_hz") && !j.at("rotation_hz").is_null()) {
      e.rotation_hz = j.at("rotation_hz").get<double>();
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

}  // namespace hamfault
