#pragma once

#include <string>
#include <vector>

namespace cascade {

struct ChartSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
};

/// Standalone SVG line chart with linear axes, ticks and a legend. Non-finite
/// points are skipped.
std::string render_svg(const LineChart& chart);

}  // namespace cascade
