#pragma once
// Small SVG writers for the evaluation figures: grouped bars with optional
// 95% CI whiskers, and histograms, single or as two side-by-side panels.
// No dependencies, deterministic output (fixed palette, fixed-precision
// coordinates, shortest round-trip tick labels).

#include <string>
#include <vector>

namespace bz {

struct BarSeries {
  std::string label;
  std::vector<double> values; // one per group, NaN skips the bar
  std::vector<double> ci;     // optional whisker half-heights, same length
};

struct BarChart {
  std::string title;
  std::string x_label, y_label;
  std::vector<std::string> groups; // x categories
  std::vector<BarSeries> series;
  double y_min = 0.0;
  double y_max = 0.0; // <= y_min derives the range from the data
  int width = 760;
  int height = 420;
};

std::string grouped_bar_svg(const BarChart& chart);

struct HistogramPanel {
  std::string title;
  std::string x_label;
  std::vector<double> values;
  int bins = 20;
  double lo = 0.0; // bin range; lo >= hi derives it from the data
  double hi = 0.0;
};

std::string histogram_svg(const HistogramPanel& panel, int width = 460,
                          int height = 360);

std::string two_panel_histogram_svg(const HistogramPanel& left,
                                    const HistogramPanel& right,
                                    int panel_width = 460, int height = 360);

} // namespace bz
