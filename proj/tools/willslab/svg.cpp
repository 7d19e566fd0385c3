#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wills::tool {

namespace {

struct Frame {
  double x0, x1, y0, y1;            // data ranges (log10)
  double px0 = 80, px1 = 760, py0 = 40, py1 = 520;
  double x(double v) const { return px0 + (v - x0) / (x1 - x0) * (px1 - px0); }
  double y(double v) const { return py1 - (v - y0) / (y1 - y0) * (py1 - py0); }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

} // namespace

std::string clt_report_svg(const CltReport& report) {
  std::vector<double> lx, ly, lo, hi;
  for (const auto& row : report.rows) {
    lx.push_back(std::log10(static_cast<double>(row.d)));
    ly.push_back(std::log10(row.ks));
    lo.push_back(std::log10(std::max(row.ks - row.ks_band, row.ks * 0.1)));
    hi.push_back(std::log10(row.ks + row.ks_band));
  }
  Frame f{*std::min_element(lx.begin(), lx.end()) - 0.3,
          *std::max_element(lx.begin(), lx.end()) + 0.3,
          *std::min_element(lo.begin(), lo.end()) - 0.3,
          *std::max_element(hi.begin(), hi.end()) + 0.3};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
         "height=\"560\" viewBox=\"0 0 800 560\">\n"
      << "<rect width=\"800\" height=\"560\" fill=\"white\"/>\n"
      << "<line x1=\"80\" y1=\"520\" x2=\"760\" y2=\"520\" stroke=\"black\"/>\n"
      << "<line x1=\"80\" y1=\"40\" x2=\"80\" y2=\"520\" stroke=\"black\"/>\n";

  // axis ticks: powers of two on x, decades on y
  for (const auto& row : report.rows) {
    const double x = f.x(std::log10(static_cast<double>(row.d)));
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"520\" x2=\"" << fmt(x)
        << "\" y2=\"526\" stroke=\"black\"/>\n"
        << "<text x=\"" << fmt(x) << "\" y=\"542\" font-size=\"12\" "
           "text-anchor=\"middle\">"
        << row.d << "</text>\n";
  }
  for (int e = static_cast<int>(std::floor(f.y0));
       e <= static_cast<int>(std::ceil(f.y1)); ++e) {
    if (e < f.y0 || e > f.y1) continue;
    const double y = f.y(e);
    svg << "<line x1=\"74\" y1=\"" << fmt(y) << "\" x2=\"80\" y2=\"" << fmt(y)
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"68\" y=\"" << fmt(y + 4)
        << "\" font-size=\"12\" text-anchor=\"end\">1e" << e << "</text>\n";
  }

  // fitted rate line: log10 ks = intercept/ln10 + slope * log10 d
  const double yl =
      report.fit.intercept / std::log(10.0) + report.fit.slope * f.x0;
  const double yr =
      report.fit.intercept / std::log(10.0) + report.fit.slope * f.x1;
  svg << "<line x1=\"" << fmt(f.x(f.x0)) << "\" y1=\"" << fmt(f.y(yl))
      << "\" x2=\"" << fmt(f.x(f.x1)) << "\" y2=\"" << fmt(f.y(yr))
      << "\" stroke=\"#c33\" stroke-width=\"1.5\"/>\n";

  // DKW bands and points
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double x = f.x(lx[i]);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(f.y(lo[i]))
        << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(f.y(hi[i]))
        << "\" stroke=\"#36c\"/>\n"
        << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(f.y(ly[i]))
        << "\" r=\"4\" fill=\"#36c\"/>\n";
  }

  svg << "<text x=\"420\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">"
      << report.family.name() << " family, c=" << fmt(report.family.c)
      << ", alpha=" << fmt(report.family.alpha)
      << ": KS vs d (log-log), slope=" << fmt(report.fit.slope) << " +- "
      << fmt(report.fit.stderr) << "</text>\n"
      << "<text x=\"420\" y=\"556\" font-size=\"13\" "
         "text-anchor=\"middle\">dimension d</text>\n"
      << "</svg>\n";
  return svg.str();
}

} // namespace wills::tool
