#pragma once

#include <string>
#include <vector>

namespace zonal::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  int width = 640;
  int height = 420;
};

/// Line plot with axes, ticks and a legend. Points that are not finite, or
/// not positive on a log axis, break the polyline.
std::string render_svg(const std::vector<Series>& series, const PlotOptions& opts);

}  // namespace zonal::plot
