// Copyright 2026 The l1risk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Minimal self-contained SVG line plots: polylines, points with error bars
// and dotted reference curves on linear or logarithmic axes.

#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "l1risk/error.hpp"

namespace l1risk {

enum class SeriesStyle { Line, Dotted, Points };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // half-widths for Points, optional
  SeriesStyle style = SeriesStyle::Line;
  std::string color = "#1f77b4";
};

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool log_x = true,
          bool log_y = true)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
        log_x_(log_x), log_y_(log_y) {}

  void add(Series s) {
    if (s.x.size() != s.y.size()) throw DomainError("SvgPlot: x and y lengths differ");
    if (!s.err.empty() && s.err.size() != s.y.size())
      throw DomainError("SvgPlot: error bars must match y");
    series_.push_back(std::move(s));
  }

  void write(std::ostream& os) const {
    Range xr = range(true), yr = range(false);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << std::setprecision(6);
    text(os, kWidth / 2.0, 24, title_, "middle", 16);
    text(os, kLeft + plot_w() / 2, kHeight - 12, xlabel_, "middle", 13);
    os << "<text x=\"18\" y=\"" << kTop + plot_h() / 2
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
          "transform=\"rotate(-90 18 "
       << kTop + plot_h() / 2 << ")\">" << xml_escape(ylabel_) << "</text>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w()
       << "\" height=\"" << plot_h() << "\" fill=\"none\" stroke=\"black\"/>\n";
    axis_ticks(os, xr, true);
    axis_ticks(os, yr, false);

    int legend_row = 0;
    for (const auto& s : series_) {
      const std::string dash =
          s.style == SeriesStyle::Dotted ? " stroke-dasharray=\"2,4\"" : "";
      if (s.style == SeriesStyle::Points) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (!usable(s.x[i], log_x_) || !usable(s.y[i], log_y_)) continue;
          const double px = map(s.x[i], xr, true), py = map(s.y[i], yr, false);
          if (!s.err.empty() && s.err[i] > 0.0) {
            const double lo = s.y[i] - s.err[i], hi = s.y[i] + s.err[i];
            const double plo = usable(lo, log_y_) ? map(lo, yr, false) : kTop + plot_h();
            const double phi = map(hi, yr, false);
            os << "<line x1=\"" << px << "\" y1=\"" << plo << "\" x2=\"" << px << "\" y2=\""
               << phi << "\" stroke=\"" << s.color << "\"/>\n";
            for (double yy : {plo, phi})
              os << "<line x1=\"" << px - 3 << "\" y1=\"" << yy << "\" x2=\"" << px + 3
                 << "\" y2=\"" << yy << "\" stroke=\"" << s.color << "\"/>\n";
          }
          os << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\"" << s.color
             << "\"/>\n";
        }
      } else {
        // Break the polyline at unusable samples.
        std::ostringstream pts;
        pts << std::setprecision(6);
        auto flush = [&] {
          if (pts.str().empty()) return;
          os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
             << dash << " points=\"" << pts.str() << "\"/>\n";
          pts.str("");
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (!usable(s.x[i], log_x_) || !usable(s.y[i], log_y_)) {
            flush();
            continue;
          }
          pts << map(s.x[i], xr, true) << ',' << map(s.y[i], yr, false) << ' ';
        }
        flush();
      }
      const double ly = kTop + 14 + 16 * legend_row++;
      const double lx = kLeft + plot_w() - 170;
      os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 20 << "\" y2=\""
         << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"" << dash << "/>\n";
      text(os, lx + 26, ly, s.label, "start", 11);
    }
    os << "</svg>\n";
  }

 private:
  struct Range {
    double lo, hi;
  };

  static constexpr double kWidth = 720, kHeight = 480;
  static constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

  static double plot_w() { return kWidth - kLeft - kRight; }
  static double plot_h() { return kHeight - kTop - kBottom; }

  static bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

  Range range(bool is_x) const {
    const bool log = is_x ? log_x_ : log_y_;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : series_) {
      const auto& v = is_x ? s.x : s.y;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!usable(s.x[i], log_x_) || !usable(s.y[i], log_y_)) continue;
        double a = v[i], b = v[i];
        if (!is_x && !s.err.empty()) {
          a -= s.err[i];
          b += s.err[i];
          if (!usable(a, log)) a = v[i];
        }
        lo = std::min(lo, a);
        hi = std::max(hi, b);
      }
    }
    if (!(lo <= hi)) return log ? Range{1.0, 10.0} : Range{0.0, 1.0};
    if (log) {
      lo = std::pow(10.0, std::floor(std::log10(lo)));
      hi = std::pow(10.0, std::ceil(std::log10(hi)));
      if (hi <= lo) hi = lo * 10.0;
    } else {
      const double pad = hi > lo ? 0.05 * (hi - lo) : 1.0;
      lo -= pad;
      hi += pad;
    }
    return {lo, hi};
  }

  double map(double v, const Range& r, bool is_x) const {
    const bool log = is_x ? log_x_ : log_y_;
    const double u = log ? (std::log10(v) - std::log10(r.lo)) / (std::log10(r.hi) - std::log10(r.lo))
                         : (v - r.lo) / (r.hi - r.lo);
    return is_x ? kLeft + u * plot_w() : kTop + (1.0 - u) * plot_h();
  }

  void axis_ticks(std::ostream& os, const Range& r, bool is_x) const {
    const bool log = is_x ? log_x_ : log_y_;
    std::vector<double> ticks;
    if (log) {
      for (double d = std::round(std::log10(r.lo)); d <= std::log10(r.hi) + 1e-9; d += 1.0)
        ticks.push_back(std::pow(10.0, d));
    } else {
      for (int i = 0; i <= 5; ++i) ticks.push_back(r.lo + (r.hi - r.lo) * i / 5.0);
    }
    for (double t : ticks) {
      const double p = map(t, r, is_x);
      std::ostringstream label;
      label << std::setprecision(4) << t;
      if (is_x) {
        os << "<line x1=\"" << p << "\" y1=\"" << kTop + plot_h() << "\" x2=\"" << p
           << "\" y2=\"" << kTop + plot_h() + 5 << "\" stroke=\"black\"/>\n";
        text(os, p, kTop + plot_h() + 18, label.str(), "middle", 11);
      } else {
        os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << p << "\" x2=\"" << kLeft
           << "\" y2=\"" << p << "\" stroke=\"black\"/>\n";
        text(os, kLeft - 8, p + 4, label.str(), "end", 11);
      }
    }
  }

  static void text(std::ostream& os, double x, double y, const std::string& s,
                   const char* anchor, int size) {
    os << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\""
       << size << "\" text-anchor=\"" << anchor << "\">" << xml_escape(s) << "</text>\n";
  }

  std::string title_, xlabel_, ylabel_;
  bool log_x_, log_y_;
  std::vector<Series> series_;
};

}  // namespace l1risk
