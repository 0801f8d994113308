#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cts {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal SVG line plot: axes, tick labels, one polyline per series.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series) {
  if (series.empty()) throw std::invalid_argument("write_svg_plot: no series");
  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) {
    y_min -= 0.5;
    y_max += 0.5;
  }

  const double w = 720, h = 480, ml = 80, mr = 140, mt = 40, mb = 55;
  const double pw = w - ml - mr, ph = h - mt - mb;
  auto px = [&](double x) { return ml + pw * (x - x_min) / (x_max - x_min); };
  auto py = [&](double y) { return mt + ph * (1.0 - (y - y_min) / (y_max - y_min)); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << w / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
      << "</text>\n";

  // axes and ticks
  out << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='" << mt + ph
      << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + ph
      << "' stroke='black'/>\n";
  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double fx = x_min + (x_max - x_min) * i / n_ticks;
    const double fy = y_min + (y_max - y_min) * i / n_ticks;
    char xb[32], yb[32];
    std::snprintf(xb, sizeof(xb), "%.4g", fx);
    std::snprintf(yb, sizeof(yb), "%.4g", fy);
    out << "<line x1='" << px(fx) << "' y1='" << mt + ph << "' x2='" << px(fx) << "' y2='"
        << mt + ph + 5 << "' stroke='black'/>\n";
    out << "<text x='" << px(fx) << "' y='" << mt + ph + 20
        << "' text-anchor='middle' font-size='11'>" << xb << "</text>\n";
    out << "<line x1='" << ml - 5 << "' y1='" << py(fy) << "' x2='" << ml << "' y2='" << py(fy)
        << "' stroke='black'/>\n";
    out << "<text x='" << ml - 8 << "' y='" << py(fy) + 4
        << "' text-anchor='end' font-size='11'>" << yb << "</text>\n";
  }
  out << "<text x='" << ml + pw / 2 << "' y='" << h - 12
      << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
  out << "<text x='18' y='" << mt + ph / 2 << "' text-anchor='middle' font-size='13' "
      << "transform='rotate(-90 18 " << mt + ph / 2 << ")'>" << y_label << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % 10];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < series[s].x.size(); ++i)
      out << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
    out << "'/>\n";
    out << "<text x='" << ml + pw + 10 << "' y='" << mt + 15 + 16 * s << "' font-size='12' fill='"
        << color << "'>" << series[s].name << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace cts
