#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "maxent/error.hpp"
#include "maxent/harness.hpp"

namespace maxent::harness {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void write_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "M,rmse,std_dev,mean_estimate\n";
  for (const auto& row : report.rows)
    out << row.m << ',' << fmt("%.17g", row.rmse) << ',' << fmt("%.17g", row.std_dev) << ','
        << fmt("%.17g", row.mean_estimate) << '\n';
}

void write_svg(const ConvergenceReport& report, std::ostream& out) {
  constexpr double width = 640, height = 480;
  constexpr double left = 80, right = 30, top = 50, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  double xmin = 0, xmax = 1, ymin = -1, ymax = 0;
  bool any = false;
  for (const auto& row : report.rows) {
    const double x = std::log2(static_cast<double>(row.m));
    for (double v : {row.rmse, row.std_dev}) {
      if (!(v > 0.0)) continue;
      const double y = std::log10(v);
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax - xmin < 1) xmax = xmin + 1;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax - ymin < 1) ymax = ymin + 1;
  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">RMSE vs M (reference "
      << fmt("%.12g", report.reference) << ")</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e) {
    const double x = px(e);
    out << "<line x1=\"" << fmt("%.2f", x) << "\" y1=\"" << top + ph << "\" x2=\"" << fmt("%.2f", x)
        << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt("%.2f", x) << "\" y=\"" << top + ph + 20
        << "\" text-anchor=\"middle\">2^" << e << "</text>\n";
  }
  for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
    const double y = py(e);
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << fmt("%.2f", y) << "\" x2=\"" << left
        << "\" y2=\"" << fmt("%.2f", y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << fmt("%.2f", y + 4)
        << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\">M</text>\n";

  for (const auto& row : report.rows) {
    const double x = px(std::log2(static_cast<double>(row.m)));
    if (row.rmse > 0.0)
      out << "<circle cx=\"" << fmt("%.2f", x) << "\" cy=\"" << fmt("%.2f", py(std::log10(row.rmse)))
          << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    if (row.std_dev > 0.0)
      out << "<rect x=\"" << fmt("%.2f", x - 3.5) << "\" y=\""
          << fmt("%.2f", py(std::log10(row.std_dev)) - 3.5)
          << "\" width=\"7\" height=\"7\" fill=\"none\" stroke=\"#d62728\"/>\n";
  }

  if (report.rows.size() >= 2) {
    // rmse = 2^intercept * M^slope, drawn over the grid.
    const auto guide = [&](double lx) {
      return (report.intercept + report.slope * lx) * std::log10(2.0);
    };
    out << "<line x1=\"" << fmt("%.2f", px(xmin)) << "\" y1=\"" << fmt("%.2f", py(guide(xmin)))
        << "\" x2=\"" << fmt("%.2f", px(xmax)) << "\" y2=\"" << fmt("%.2f", py(guide(xmax)))
        << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    out << "<text x=\"" << fmt("%.2f", px(xmax) - 10) << "\" y=\"" << top + 20
        << "\" text-anchor=\"end\">slope " << fmt("%.2f", report.slope) << "</text>\n";
  }
  out << "<circle cx=\"" << left + 15 << "\" cy=\"" << top + ph - 30
      << "\" r=\"4\" fill=\"#1f77b4\"/><text x=\"" << left + 25 << "\" y=\"" << top + ph - 26
      << "\">rmse</text>\n";
  out << "<rect x=\"" << left + 11.5 << "\" y=\"" << top + ph - 18.5
      << "\" width=\"7\" height=\"7\" fill=\"none\" stroke=\"#d62728\"/><text x=\"" << left + 25
      << "\" y=\"" << top + ph - 11 << "\">std dev</text>\n";
  out << "</svg>\n";
}

void emit_report(const ConvergenceReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
  const auto write = [&](const std::filesystem::path& path, auto&& body) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw Error("write failed: " + path.string());
  };
  write(out_dir / "convergence.csv", [&](std::ostream& o) { write_csv(report, o); });
  write(out_dir / "convergence.svg", [&](std::ostream& o) { write_svg(report, o); });
}

}  // namespace maxent::harness
