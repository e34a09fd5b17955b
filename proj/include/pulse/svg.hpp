#pragma once

// Diagnostic SVG plots: polyline series and point markers on a single axis
// box, optionally log-scaled in y. No external plotting dependency.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pulse/csv.hpp"

namespace pulse {

struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "black";
  bool markers_only = false;  // draw circles instead of a polyline
};

class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label, bool log_y = false)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)),
        log_y_(log_y) {}

  void add(SvgSeries s) { series_.push_back(std::move(s)); }

  void write(const std::string& path) const {
    const double w = 720, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_)
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double yv = transform(s.y[i]);
        if (!std::isfinite(yv)) continue;
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, yv);
        ymax = std::max(ymax, yv);
      }
    if (!(xmax > xmin)) xmax = xmin + 1;
    if (!(ymax > ymin)) ymax = ymin + 1;
    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    const auto py = [&](double y) {
      return h - mb - (transform(y) - ymin) / (ymax - ymin) * (h - mt - mb);
    };
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr << "\" height=\""
        << h - mt - mb << "\" fill=\"none\" stroke=\"gray\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\">" << title_ << "</text>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">" << x_label_
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << h / 2 << ")\">" << y_label_ << (log_y_ ? " (log10)" : "") << "</text>\n";
    // Corner tick labels.
    out << "<text x=\"" << ml << "\" y=\"" << h - mb + 18 << "\">" << format_number(xmin)
        << "</text>\n<text x=\"" << w - mr << "\" y=\"" << h - mb + 18
        << "\" text-anchor=\"end\">" << format_number(xmax) << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << h - mb << "\" text-anchor=\"end\">"
        << format_number(ymin) << "</text>\n<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
        << "\" text-anchor=\"end\">" << format_number(ymax) << "</text>\n";
    for (const auto& s : series_) {
      if (s.markers_only) {
        for (std::size_t i = 0; i < s.x.size(); ++i)
          out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
              << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      } else {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
          out << px(s.x[i]) << "," << py(s.y[i]) << " ";
        out << "\"/>\n";
      }
    }
    out << "</svg>\n";
  }

 private:
  double transform(double y) const { return log_y_ ? std::log10(std::max(y, 1e-300)) : y; }

  std::string title_, x_label_, y_label_;
  bool log_y_;
  std::vector<SvgSeries> series_;
};

}  // namespace pulse
