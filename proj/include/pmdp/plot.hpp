#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pmdp/gridworld.hpp"

namespace pmdp {

/// One chart series: y values against episode index 1..n.
struct ChartSeries {
    std::string name;
    std::vector<double> values;
};

/// Self-contained SVG line chart. The numeric series ride along in a
/// <metadata> block as CSV so tools (and tests) can parse the plotted data
/// back out of the file without an image diff.
void write_line_chart_svg(const std::filesystem::path& path, const std::string& title,
                          const std::string& y_label, const std::vector<ChartSeries>& series);

/// Parses the embedded data block back out of a chart file.
std::vector<ChartSeries> read_chart_series(const std::filesystem::path& path);

/// Grid heatmap of per-cell mass (row-major, walls drawn dark).
void write_heatmap_svg(const std::filesystem::path& path, const std::string& title,
                       const GridSpec& grid, const std::vector<double>& cell_mass);

} // namespace pmdp
