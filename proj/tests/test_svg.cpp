#include <cmath>
#include <limits>

#include "beliefzones/svg.hpp"
#include "doctest.h"

using namespace bz;

static int count_sub(const std::string& s, const std::string& needle) {
  int n = 0;
  for (size_t pos = s.find(needle); pos != std::string::npos;
       pos = s.find(needle, pos + needle.size()))
    ++n;
  return n;
}

TEST_CASE("grouped bars render labels, bars, and whiskers") {
  BarChart chart;
  chart.title = "mean t to tolerance";
  chart.x_label = "alpha";
  chart.y_label = "iterations";
  chart.groups = {"0.2", "0.4", "0.6"};
  BarSeries a{"eta=0.0", {5.0, 8.0, 12.0}, {0.5, 0.4, 0.8}};
  BarSeries b{"eta=1.0", {7.0, 11.0, 19.0}, {}};
  chart.series = {a, b};
  std::string svg = grouped_bar_svg(chart);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("mean t to tolerance") != std::string::npos);
  CHECK(svg.find("eta=0.0") != std::string::npos);
  CHECK(svg.find("eta=1.0") != std::string::npos);
  for (const auto& g : chart.groups)
    CHECK(svg.find(">" + g + "<") != std::string::npos);
  // background + 6 bars + 2 legend swatches
  CHECK(count_sub(svg, "<rect") == 9);
  // each positive CI draws three whisker lines
  BarChart no_ci = chart;
  no_ci.series[0].ci.clear();
  std::string plain = grouped_bar_svg(no_ci);
  CHECK(count_sub(svg, "<line") - count_sub(plain, "<line") == 9);
  // rerun is byte-identical
  CHECK(grouped_bar_svg(chart) == svg);
}

TEST_CASE("NaN values skip their bars") {
  BarChart chart;
  chart.groups = {"a", "b"};
  BarSeries s{"only", {1.0, std::numeric_limits<double>::quiet_NaN()}, {}};
  chart.series = {s};
  std::string svg = grouped_bar_svg(chart);
  // background + 1 bar + 1 legend swatch
  CHECK(count_sub(svg, "<rect") == 3);
}

TEST_CASE("histograms bucket values into rects") {
  HistogramPanel p;
  p.title = "churn";
  p.x_label = "chi";
  p.values = {0.05, 0.1, 0.12, 0.5, 0.55, 0.9};
  p.bins = 4;
  p.lo = 0.0;
  p.hi = 1.0;
  std::string svg = histogram_svg(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  // counts per bin: 3, 0, 2, 1 -> the empty bin draws nothing
  CHECK(count_sub(svg, "<rect") == 1 + 3);
  CHECK(svg.find("churn") != std::string::npos);
  CHECK(histogram_svg(p) == svg);
  // NaN values are dropped, not binned
  p.values.push_back(std::numeric_limits<double>::quiet_NaN());
  CHECK(histogram_svg(p) == svg);
}

TEST_CASE("two-panel layout doubles the width") {
  HistogramPanel left;
  left.title = "pre";
  left.values = {0.1, 0.2, 0.3};
  HistogramPanel right;
  right.title = "post";
  right.values = {0.4, 0.5};
  std::string both = two_panel_histogram_svg(left, right, 460, 360);
  CHECK(both.rfind("<svg", 0) == 0);
  CHECK(both.find("width=\"920\"") != std::string::npos);
  CHECK(both.find("pre") != std::string::npos);
  CHECK(both.find("post") != std::string::npos);
}
