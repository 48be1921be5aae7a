#pragma once

#include <string>
#include <vector>

#include "rmcf/csv.hpp"

namespace rmcf {

struct PlotSpec {
  std::string column;
  bool log_scale = false;
};

/// Quantities that decay on convergent runs; plotted on a log axis by default
/// when every value is positive.
bool is_decay_quantity(const std::string& column);

/// One spec per column other than `t`, log scale for positive decay quantities.
std::vector<PlotSpec> default_plot_specs(const CsvTable& table);

/// Polyline of `column` against `t` with axes, ticks and labels. Output is a
/// pure function of the input. Throws InvalidArgument for fewer than two rows
/// or a log plot with non-positive values, FormatError for missing columns.
std::string render_svg(const CsvTable& table, const PlotSpec& spec);

/// Writes `<stem>_<column>.svg` into `dir` for every spec; returns the paths.
std::vector<std::string> emit_plots(const CsvTable& table, const std::vector<PlotSpec>& specs, const std::string& dir,
                                    const std::string& stem);

}  // namespace rmcf
