#pragma once

#include "hamfault/labels.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hamfault {

inline constexpr std::size_t kChannelCount = 8;

/// Documented column order of the dataset CSV files.
inline constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "tachometer",       "underhang_axial",  "underhang_radial", "underhang_tangential",
    "overhang_axial",   "overhang_radial",  "overhang_tangential", "microphone",
};

inline constexpr double kDefaultSampleRate = 50'000.0;
inline constexpr double kNominalDuration = 5.0;

/// One multichannel vibration recording. `channels` is 8 x samples.
struct SequenceRecord {
  Eigen::MatrixXd channels;
  double sample_rate = kDefaultSampleRate;
  ClassLabel label;
  std::string sequence_id;
  std::string source_path;
  std::optional<double> rotation_hz;
  std::vector<std::string> warnings;

  std::size_t sample_count() const { return static_cast<std::size_t>(channels.cols()); }
  double duration() const { return static_cast<double>(sample_count()) / sample_rate; }
};

struct ManifestEntry {
  std::string path;  // relative to the manifest root
  std::string raw_label;
  ClassLabel label;
  std::optional<double> rotation_hz;
  std::string sequence_id;
};

struct DatasetManifest {
  std::string root;
  std::vector<ManifestEntry> entries;

  /// Entry counts indexed by FaultClass.
  std::array<std::size_t, kClassCount> counts() const;
  std::filesystem::path resolve(const ManifestEntry& entry) const;
};

/// Recursively scans a dataset tree. Top-level directories must be one of the
/// known states; bearing directories must hold outer_race/ball_fault/cage_fault.
/// Entries are ordered by relative path.
DatasetManifest scan_dataset(const std::filesystem::path& root);

struct LoadOptions {
  double sample_rate = kDefaultSampleRate;
  double nominal_duration = kNominalDuration;
  /// column_map[c] is the file column holding channel c.
  std::array<std::size_t, kChannelCount> column_map = {0, 1, 2, 3, 4, 5, 6, 7};
};

/// Parses a headerless 8-column CSV. Sample-count mismatches against
/// sample_rate * nominal_duration (beyond one sample) are recorded as warnings.
SequenceRecord load_sequence(const std::filesystem::path& path, const LoadOptions& options = {});
SequenceRecord load_sequence(const DatasetManifest& manifest, const ManifestEntry& entry,
                             const LoadOptions& options = {});

/// Headerless 8-column CSV, one row per sample.
void save_sequence_csv(const SequenceRecord& record, const std::filesystem::path& path);

/// Rotation frequency encoded in a file stem such as "23.7568"; nullopt otherwise.
std::optional<double> parse_rotation(std::string_view stem);

nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& doc);

}  // namespace hamfault
