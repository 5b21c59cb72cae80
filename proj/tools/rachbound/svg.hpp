#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rachbound::cli {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

/// Self-contained SVG line chart. Points that cannot be drawn on a log axis
/// (value <= 0) are skipped.
std::string render_svg(const Chart& chart);

}  // namespace rachbound::cli
