#include "slabperc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace slabperc {

namespace {

struct Point {
  double x, y, lo, hi;
};

constexpr double kWidth = 640, kHeight = 420, kMargin = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<EstimateRecord>& records, const PlotSpec& spec) {
  std::map<std::string, std::vector<Point>> series;
  for (const auto& r : records) {
    if (!r.params.contains(spec.x_param) || !r.params[spec.x_param].is_number()) continue;
    std::string name = r.experiment;
    if (!spec.series_param.empty() && r.params.contains(spec.series_param))
      name = spec.series_param + "=" + r.params[spec.series_param].dump();
    series[name].push_back(
        {r.params[spec.x_param].get<double>(), r.estimate, r.ci95.lo, r.ci95.hi});
  }
  if (series.empty()) throw DomainError("no records carry parameter '" + spec.x_param + "'");

  const auto tx = [&](double v) {
    if (spec.log_x && !(v > 0)) throw DomainError("log x axis needs positive values");
    return spec.log_x ? std::log10(v) : v;
  };
  const auto ty = [&](double v) {
    if (spec.log_y) return std::log10(std::max(v, 1e-12));
    return v;
  };
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    for (const auto& p : pts) {
      if (spec.log_y && !(p.y > 0)) continue;
      x0 = std::min(x0, tx(p.x));
      x1 = std::max(x1, tx(p.x));
      y0 = std::min(y0, ty(p.lo > 0 || !spec.log_y ? p.lo : p.y));
      y1 = std::max(y1, ty(p.hi));
    }
  }
  if (x0 > x1) throw DomainError("log y axis needs positive estimates");
  if (x1 - x0 < 1e-12) x0 -= 1, x1 += 1;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const auto px = [&](double v) { return kMargin + (tx(v) - x0) / (x1 - x0) * (kWidth - 2 * kMargin); };
  const auto py = [&](double v) {
    return kHeight - kMargin - (ty(v) - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << escape(spec.title)
      << "</text>\n";
  svg << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4, fy = y0 + (y1 - y0) * i / 4;
    const double sx = kMargin + (kWidth - 2 * kMargin) * i / 4;
    const double sy = kHeight - kMargin - (kHeight - 2 * kMargin) * i / 4;
    svg << "<text x=\"" << sx << "\" y=\"" << kHeight - kMargin + 16
        << "\" text-anchor=\"middle\">" << (spec.log_x ? std::pow(10, fx) : fx) << "</text>\n";
    svg << "<text x=\"" << kMargin - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
        << (spec.log_y ? std::pow(10, fy) : fy) << "</text>\n";
  }
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
      << escape(spec.x_param) << "</text>\n";

  int idx = 0;
  for (const auto& [name, pts] : series) {
    const char* color = kColors[idx % 6];
    std::ostringstream line;
    for (const auto& p : pts) {
      if (spec.log_y && !(p.y > 0)) continue;
      line << px(p.x) << ',' << py(p.y) << ' ';
      const double lo = spec.log_y && !(p.lo > 0) ? p.y : p.lo;
      svg << "<line x1=\"" << px(p.x) << "\" y1=\"" << py(lo) << "\" x2=\"" << px(p.x)
          << "\" y2=\"" << py(p.hi) << "\" stroke=\"" << color << "\"/>\n";
      svg << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"" << line.str()
        << "\"/>\n";
    svg << "<text x=\"" << kWidth - kMargin + 4 << "\" y=\"" << kMargin + 16 * idx
        << "\" fill=\"" << color << "\">" << escape(name) << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace slabperc
