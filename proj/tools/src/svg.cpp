#include "ipi/tools/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ipi/error.hpp"

namespace ipi::tools {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::string coord(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(1e-12, 0.5 * std::abs(hi));
      lo -= pad;
      hi += pad;
    }
  }
};

// Round tick spacing: 1, 2 or 5 times a power of ten.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

void render_panel(std::ostringstream& out, const LineChart& chart, double top,
                  int width, int height) {
  const double left = 70.0, right = 160.0, pad_top = 32.0, pad_bottom = 46.0;
  const double x0 = left, x1 = width - right;
  const double y0 = top + pad_top, y1 = top + height - pad_bottom;

  auto ty = [&](double v) {
    if (!chart.log_y) return v;
    return v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
  };

  Range xr, yr;
  for (const Series& s : chart.series) {
    for (double v : s.x) xr.include(v);
    for (double v : s.y) yr.include(ty(v));
  }
  for (const HorizontalMarker& m : chart.markers) yr.include(ty(m.y));
  xr.finish();
  yr.finish();

  auto px = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
  auto py = [&](double v) { return y1 - (v - yr.lo) / (yr.hi - yr.lo) * (y1 - y0); };

  out << "<g>\n";
  out << "<text x=\"" << coord(0.5 * (x0 + x1)) << "\" y=\"" << coord(top + 20)
      << "\" text-anchor=\"middle\" font-size=\"15\">" << escape(chart.title) << "</text>\n";
  out << "<rect x=\"" << coord(x0) << "\" y=\"" << coord(y0) << "\" width=\""
      << coord(x1 - x0) << "\" height=\"" << coord(y1 - y0)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  const double xs = nice_step(xr.hi - xr.lo, 8);
  for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + 1e-9 * xs; v += xs) {
    out << "<line x1=\"" << coord(px(v)) << "\" y1=\"" << coord(y1) << "\" x2=\""
        << coord(px(v)) << "\" y2=\"" << coord(y1 + 5) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << coord(px(v)) << "\" y=\"" << coord(y1 + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << num(std::abs(v) < 1e-12 * xs ? 0.0 : v)
        << "</text>\n";
  }
  const double ys = nice_step(yr.hi - yr.lo, 6);
  for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + 1e-9 * ys; v += ys) {
    const double shown = std::abs(v) < 1e-12 * ys ? 0.0 : v;
    out << "<line x1=\"" << coord(x0 - 5) << "\" y1=\"" << coord(py(v)) << "\" x2=\""
        << coord(x1) << "\" y2=\"" << coord(py(v)) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << coord(x0 - 8) << "\" y=\"" << coord(py(v) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">"
        << (chart.log_y ? "1e" + num(shown) : num(shown)) << "</text>\n";
  }
  out << "<text x=\"" << coord(0.5 * (x0 + x1)) << "\" y=\"" << coord(y1 + 38)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(chart.x_label) << "</text>\n";
  out << "<text transform=\"translate(" << coord(18) << "," << coord(0.5 * (y0 + y1))
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << escape(chart.y_label)
      << "</text>\n";

  for (const HorizontalMarker& m : chart.markers) {
    const double v = ty(m.y);
    if (!std::isfinite(v)) continue;
    out << "<line data-marker=\"" << escape(m.label) << "\" x1=\"" << coord(x0) << "\" y1=\""
        << coord(py(v)) << "\" x2=\"" << coord(x1) << "\" y2=\"" << coord(py(v))
        << "\" stroke=\"#555\" stroke-dasharray=\"6,4\"/>\n";
    out << "<text x=\"" << coord(x1 - 4) << "\" y=\"" << coord(py(v) - 4)
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#555\">" << escape(m.label)
        << "</text>\n";
  }

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const Series& s = chart.series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    out << "<polyline data-series=\"" << escape(s.name) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t j = 0; j < std::min(s.x.size(), s.y.size()); ++j) {
      const double v = ty(s.y[j]);
      if (!std::isfinite(v) || !std::isfinite(s.x[j])) continue;
      if (!first) out << ' ';
      out << coord(px(s.x[j])) << ',' << coord(py(v));
      first = false;
    }
    out << "\"/>\n";
    const double ly = y0 + 14.0 + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << coord(x1 + 12) << "\" y1=\"" << coord(ly) << "\" x2=\""
        << coord(x1 + 36) << "\" y2=\"" << coord(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << coord(x1 + 42) << "\" y=\"" << coord(ly + 4)
        << "\" font-size=\"12\">" << escape(s.name) << "</text>\n";
  }
  out << "</g>\n";
}

}  // namespace

std::string render_svg(const LineChart& chart, int width, int height) {
  return render_svg_panels({chart}, width, height);
}

std::string render_svg_panels(const std::vector<LineChart>& panels, int width,
                              int panel_height) {
  if (panels.empty()) fail(ErrorCode::kInput, "nothing to plot");
  const int height = panel_height * static_cast<int>(panels.size());
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    render_panel(out, panels[i], static_cast<double>(i) * panel_height, width, panel_height);
  out << "</svg>\n";
  return out.str();
}

}  // namespace ipi::tools
