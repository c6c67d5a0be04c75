#pragma once

// Static SVG line plots of run tables.

#include <filesystem>
#include <string>
#include <vector>

#include "loglin/sim/scenario.hpp"
#include "loglin/sim/table.hpp"

namespace loglin::sim {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string y_label;
  std::vector<Series> series;
  /// Dashed horizontal reference lines (e.g. y = 1).
  std::vector<double> reference_lines;
  bool log_y = false;
};

/// Renders stacked panels sharing the x axis. Output depends only on the input.
std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::vector<Panel>& panels);

/// Writes the figures for a run table and returns their paths:
/// validate -> log_error.svg, residual.svg; bound -> bound_ratio.svg;
/// stabilize -> stabilize.svg. Throws IoError for a table without rows.
std::vector<std::filesystem::path> emit_plots(const Table& table, Mode mode,
                                              const std::filesystem::path& out_dir);

/// Same, reading the table from a CSV artifact.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& csv, Mode mode,
                                              const std::filesystem::path& out_dir);

}  // namespace loglin::sim
