#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace drsafe::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  bool equal_aspect = false;
  int width = 640;
  int height = 420;
};

/// Standalone SVG polyline chart with axes, ticks at the data range ends
/// and a legend. Non-finite points (and non-positive ones on log axes) are
/// dropped.
void write_line_chart(std::ostream& out, const std::vector<Series>& series,
                      const ChartOptions& opts);

}  // namespace drsafe::plot
