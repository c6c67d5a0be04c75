#pragma once

// Column-named numeric tables and their CSV / JSON renderings.

#include <filesystem>
#include <string>
#include <vector>

namespace loglin::sim {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws std::invalid_argument if the row width differs from columns.size().
  void add_row(std::vector<double> row);
  /// Index of `name`; throws std::out_of_range if absent.
  [[nodiscard]] std::size_t column_index(const std::string& name) const;
  [[nodiscard]] std::vector<double> column(const std::string& name) const;
};

/// Decimal rendering with 17 significant digits.
std::string format_number(double x);

std::string to_csv(const Table& table);
/// {"columns": [...], "rows": [[...], ...]}.
std::string to_json(const Table& table);

/// Throws IoError when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Parses a CSV written by to_csv. Throws IoError on unreadable or malformed input.
Table read_csv(const std::filesystem::path& path);

}  // namespace loglin::sim
