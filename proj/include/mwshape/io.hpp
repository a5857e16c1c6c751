#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mwshape {

/// Tab-separated table: one header line of column names, then numeric rows.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws ContractError if absent
};

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

/// Values on a (row axis) x (column axis) lattice. File layout: first line
/// "<row_label>\\<col_label>" followed by the column coordinates; every further line is a
/// row coordinate followed by its values.
struct Map2D {
  std::string row_label;
  std::string column_label;
  std::vector<double> row_axis;
  std::vector<double> column_axis;
  std::vector<double> values;  // row-major

  double at(std::size_t r, std::size_t c) const { return values[r * column_axis.size() + c]; }
};

void write_map(const std::filesystem::path& path, const Map2D& map);
Map2D read_map(const std::filesystem::path& path);

/// Shortest round-trip decimal representation used in all outputs.
std::string format_number(double v);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Writes text, throwing std::runtime_error naming the path on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mwshape
