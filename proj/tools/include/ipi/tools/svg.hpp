#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ipi::tools {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct HorizontalMarker {
  std::string label;
  double y = 0.0;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<HorizontalMarker> markers;
  bool log_y = false;
};

/// Self-contained SVG 1.1 document: axes, ticks, labels, legend and one
/// polyline per series.
std::string render_svg(const LineChart& chart, int width = 720, int height = 420);

/// Stacked panels sharing the x axis, rendered into one document.
std::string render_svg_panels(const std::vector<LineChart>& panels, int width = 720,
                              int panel_height = 300);

}  // namespace ipi::tools
