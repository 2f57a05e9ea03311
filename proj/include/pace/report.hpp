// Rendering of run artifacts: CSV loaders, ASCII scene art and SVG charts.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pace/trainer.hpp"

namespace pace {

struct MissingMetrics : GridError {
  using GridError::GridError;
};

std::vector<EpochRow> load_metrics(const std::filesystem::path& file);
std::vector<QTraceRow> load_qtrace(const std::filesystem::path& file);

// Top row first; '#' occupied, '.' free.
std::string ascii_grid(const Grid& grid);

struct ChartSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

// Minimal standalone line chart; one polyline point per data point.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series);

// Renders charts (and scene art when available) into <run_dir>/report from the
// metrics files alone. Throws MissingMetrics when metrics.csv is absent.
void render_report(const std::filesystem::path& run_dir);

}  // namespace pace
