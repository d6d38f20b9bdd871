#pragma once

#include <string>
#include <vector>

namespace gnls {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  int width = 720;
  int height = 460;
};

/// Line plot as a standalone SVG document. Non-finite points, and nonpositive
/// ones on log axes, are dropped.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec);

}  // namespace gnls
