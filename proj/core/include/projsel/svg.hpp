#pragma once

// Plain SVG charts for the report files.

#include <string>
#include <utility>
#include <vector>

namespace projsel::svg {

struct Axes {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool zero_line = false;  // dashed horizontal line at y = 0
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Lines (with point markers). Series with many members are drawn thin and
/// translucent so that per-iteration traces stay readable.
std::string line_plot(const Axes& axes, const std::vector<Series>& series);

/// One box (quartiles, whiskers to min/max) per labelled group.
std::string box_plot(const Axes& axes,
                     const std::vector<std::pair<std::string, std::vector<double>>>& groups);

/// One bar per label.
std::string bar_plot(const Axes& axes, const std::vector<std::pair<std::string, double>>& bars);

}  // namespace projsel::svg
