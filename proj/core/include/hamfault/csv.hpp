#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hamfault::csv {

/// Shortest round-trip decimal form.
std::string format(double value);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Parses a full cell as a double; throws std::runtime_error naming the
/// (1-based) row and column on failure.
double parse_cell(std::string_view cell, std::size_t row, std::size_t col);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Header row followed by the rows of `values`.
void write_matrix(const std::filesystem::path& path, const std::vector<std::string>& header,
                  const Eigen::MatrixXd& values);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a CSV with a header row. Cells are kept as strings.
Table read_table(const std::filesystem::path& path);

}  // namespace hamfault::csv
