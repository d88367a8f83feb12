#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "mzi/io.hpp"

namespace mzi::io {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

/// Frequency-vs-phase figure. Layout is cosmetic; the CSV is the data.
inline void write_svg(std::ostream& os, const std::vector<SvgSeries>& series,
                      const std::string& title) {
  constexpr double kW = 640, kH = 400, kPad = 50;
  double xmin = 0.0, xmax = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (std::isnan(y)) continue;
      xmin = first ? x : std::min(xmin, x);
      xmax = first ? x : std::max(xmax, x);
      first = false;
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  const auto px = [&](double x) { return kPad + (x - xmin) / (xmax - xmin) * (kW - 2 * kPad); };
  const auto py = [&](double y) { return kH - kPad - y * (kH - 2 * kPad); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kPad << "\" y=\"30\" font-size=\"14\">" << title << "</text>\n"
     << "<line x1=\"" << kPad << "\" y1=\"" << py(0) << "\" x2=\"" << kW - kPad << "\" y2=\"" << py(0)
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << kPad << "\" y1=\"" << py(0) << "\" x2=\"" << kPad << "\" y2=\"" << py(1)
     << "\" stroke=\"black\"/>\n";
  int legend = 0;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
    for (const auto& [x, y] : s.points) {
      if (!std::isnan(y)) os << fmt_short(px(x)) << ',' << fmt_short(py(y)) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << kW - 2 * kPad - 60 << "\" y=\"" << 30 + 16 * legend++
       << "\" font-size=\"12\" fill=\"" << s.color << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace mzi::io
