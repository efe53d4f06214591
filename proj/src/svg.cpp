#include "beliefzones/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "beliefzones/csv.hpp"

namespace bz {

namespace {

const char* kPalette[] = {"#4878d0", "#ee854a", "#6acc64",
                          "#d65f5f", "#956cb4", "#8c613c"};
constexpr int kPaletteSize = 6;

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void line(std::string& out, double x1, double y1, double x2, double y2,
          const char* stroke, const char* extra = "") {
  out += "<line x1=\"" + px(x1) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(x2) +
         "\" y2=\"" + px(y2) + "\" stroke=\"" + stroke + "\"" + extra + "/>\n";
}

void rect(std::string& out, double x, double y, double w, double h,
          const std::string& fill) {
  out += "<rect x=\"" + px(x) + "\" y=\"" + px(y) + "\" width=\"" + px(w) +
         "\" height=\"" + px(h) + "\" fill=\"" + fill + "\"/>\n";
}

void text(std::string& out, double x, double y, const char* anchor, int size,
          const std::string& s, const char* extra = "") {
  out += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" text-anchor=\"" +
         anchor + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\"" + extra + ">" + esc(s) + "</text>\n";
}

std::string svg_open(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(w) + "\" height=\"" + std::to_string(h) +
         "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

double nice_step(double span, int target) {
  if (!(span > 0.0)) return 1.0;
  double raw = span / std::max(1, target);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (raw <= mult * mag * (1.0 + 1e-12)) return mult * mag;
  return 10.0 * mag;
}

void y_axis(std::string& out, double x0, double y0, double plot_h, double lo,
            double hi) {
  double step = nice_step(hi - lo, 5);
  double first = std::ceil(lo / step - 1e-9) * step;
  for (double v = first; v <= hi + step * 1e-6; v += step) {
    double y = y0 + plot_h - (v - lo) / (hi - lo) * plot_h;
    line(out, x0 - 4, y, x0, y, "#333");
    // snap ticks like 0.30000000000000004 back to the grid value
    double snapped = std::round(v / step) * step;
    text(out, x0 - 8, y + 4, "end", 11, fmt_double(snapped));
  }
  line(out, x0, y0, x0, y0 + plot_h, "#333");
}

struct Range {
  double lo = 0.0, hi = 1.0;
};

Range data_range(const std::vector<double>& vals, double lo, double hi) {
  if (lo < hi) return {lo, hi};
  if (vals.empty()) return {0.0, 1.0};
  double mn = *std::min_element(vals.begin(), vals.end());
  double mx = *std::max_element(vals.begin(), vals.end());
  if (mn == mx) return {mn - 0.5, mx + 0.5};
  return {mn, mx};
}

void render_histogram(std::string& out, const HistogramPanel& p, double ox,
                      int width, int height) {
  const double ml = 48, mr = 14, mt = 34, mb = 46;
  double plot_w = width - ml - mr;
  double plot_h = height - mt - mb;
  int bins = std::max(1, p.bins);
  Range r = data_range(p.values, p.lo, p.hi);
  std::vector<int> counts(bins, 0);
  for (double v : p.values) {
    if (std::isnan(v)) continue;
    int b = (int)((v - r.lo) / (r.hi - r.lo) * bins);
    if (b < 0) b = 0;
    if (b >= bins) b = bins - 1;
    ++counts[b];
  }
  int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));

  text(out, ox + width / 2.0, 18, "middle", 13, p.title,
       " font-weight=\"bold\"");
  double x0 = ox + ml, y0 = mt;
  y_axis(out, x0, y0, plot_h, 0.0, (double)peak);
  line(out, x0, y0 + plot_h, x0 + plot_w, y0 + plot_h, "#333");
  for (int b = 0; b < bins; ++b) {
    if (counts[b] == 0) continue;
    double h = counts[b] / (double)peak * plot_h;
    rect(out, x0 + b * plot_w / bins + 0.5, y0 + plot_h - h,
         plot_w / bins - 1.0, h, kPalette[0]);
  }
  double xstep = nice_step(r.hi - r.lo, 5);
  double first = std::ceil(r.lo / xstep - 1e-9) * xstep;
  for (double v = first; v <= r.hi + xstep * 1e-6; v += xstep) {
    double x = x0 + (v - r.lo) / (r.hi - r.lo) * plot_w;
    line(out, x, y0 + plot_h, x, y0 + plot_h + 4, "#333");
    double snapped = std::round(v / xstep) * xstep;
    text(out, x, y0 + plot_h + 16, "middle", 11, fmt_double(snapped));
  }
  text(out, x0 + plot_w / 2.0, y0 + plot_h + 34, "middle", 12, p.x_label);
}

} // namespace

std::string grouped_bar_svg(const BarChart& chart) {
  const double ml = 64, mr = 16, mt = 40, mb = 56;
  double plot_w = chart.width - ml - mr;
  double plot_h = chart.height - mt - mb;
  size_t ng = chart.groups.size();
  size_t ns = chart.series.size();

  double lo = chart.y_min, hi = chart.y_max;
  if (hi <= lo) {
    hi = lo;
    for (const BarSeries& s : chart.series)
      for (size_t g = 0; g < s.values.size(); ++g) {
        double v = s.values[g];
        if (std::isnan(v)) continue;
        double w = g < s.ci.size() ? s.ci[g] : 0.0;
        hi = std::max(hi, v + w);
      }
    if (hi <= lo) hi = lo + 1.0;
    hi = lo + (hi - lo) * 1.08;
  }

  std::string out = svg_open(chart.width, chart.height);
  text(out, chart.width / 2.0, 20, "middle", 14, chart.title,
       " font-weight=\"bold\"");
  double x0 = ml, y0 = mt;
  y_axis(out, x0, y0, plot_h, lo, hi);
  line(out, x0, y0 + plot_h, x0 + plot_w, y0 + plot_h, "#333");

  auto ypos = [&](double v) {
    double t = (v - lo) / (hi - lo);
    t = std::clamp(t, 0.0, 1.0);
    return y0 + plot_h - t * plot_h;
  };

  for (size_t g = 0; g < ng; ++g) {
    double slot = plot_w / ng;
    double band = slot * 0.8;
    double bx = x0 + g * slot + slot * 0.1;
    double bw = ns ? band / ns : band;
    for (size_t s = 0; s < ns; ++s) {
      const BarSeries& ser = chart.series[s];
      if (g >= ser.values.size() || std::isnan(ser.values[g])) continue;
      double v = ser.values[g];
      double top = ypos(v);
      rect(out, bx + s * bw + 1.0, top, bw - 2.0, y0 + plot_h - top,
           kPalette[s % kPaletteSize]);
      if (g < ser.ci.size() && ser.ci[g] > 0.0) {
        double cx = bx + s * bw + bw / 2.0;
        double yl = ypos(v - ser.ci[g]);
        double yh = ypos(v + ser.ci[g]);
        line(out, cx, yh, cx, yl, "#333");
        line(out, cx - 3, yh, cx + 3, yh, "#333");
        line(out, cx - 3, yl, cx + 3, yl, "#333");
      }
    }
    text(out, x0 + g * slot + slot / 2.0, y0 + plot_h + 18, "middle", 12,
         chart.groups[g]);
  }

  text(out, x0 + plot_w / 2.0, chart.height - 14.0, "middle", 12,
       chart.x_label);
  out += "<text x=\"16\" y=\"" + px(y0 + plot_h / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 " +
         px(y0 + plot_h / 2.0) + ")\">" +
         esc(chart.y_label) + "</text>\n";

  double lx = x0 + plot_w - 150.0, ly = y0 + 6.0;
  for (size_t s = 0; s < ns; ++s) {
    rect(out, lx, ly + s * 18.0, 12, 12, kPalette[s % kPaletteSize]);
    text(out, lx + 18, ly + s * 18.0 + 10.0, "start", 12,
         chart.series[s].label);
  }

  out += "</svg>\n";
  return out;
}

std::string histogram_svg(const HistogramPanel& panel, int width, int height) {
  std::string out = svg_open(width, height);
  render_histogram(out, panel, 0.0, width, height);
  out += "</svg>\n";
  return out;
}

std::string two_panel_histogram_svg(const HistogramPanel& left,
                                    const HistogramPanel& right,
                                    int panel_width, int height) {
  std::string out = svg_open(panel_width * 2, height);
  render_histogram(out, left, 0.0, panel_width, height);
  render_histogram(out, right, (double)panel_width, panel_width, height);
  out += "</svg>\n";
  return out;
}

} // namespace bz
