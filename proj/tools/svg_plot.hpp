#pragma once

// Minimal static SVG line charts: one or more stacked panels, linear or
// log10 y axis, legend, optional hollow markers.

#include <string>
#include <vector>

namespace uwfd::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<bool> hollow;  // per point; empty means all filled
  bool markers = true;
  bool dashed = false;
};

struct Panel {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_y = false;
  std::vector<Series> series;
};

/// Non-positive values are dropped on log axes.
std::string render(const std::vector<Panel>& panels, double width = 720.0, double panel_height = 420.0);

}  // namespace uwfd::plot
