#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace uwfd::plot {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
constexpr double kLeft = 80, kRight = 20, kTop = 36, kBottom = 56;

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
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

double nice_step(double range) {
  if (!(range > 0)) return 1.0;
  const double raw = range / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
  void pad_if_flat(double d) {
    if (hi - lo < 1e-12) {
      lo -= d;
      hi += d;
    }
  }
};

void draw_panel(std::ostringstream& out, const Panel& p, double y0, double width, double height) {
  const double pw = width - kLeft - kRight, ph = height - kTop - kBottom;
  Range xr, yr;
  for (const auto& s : p.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (p.log_y && s.y[i] <= 0) continue;
      xr.add(s.x[i]);
      yr.add(p.log_y ? std::log10(s.y[i]) : s.y[i]);
    }
  if (xr.empty()) xr = {0.0, 1.0};
  if (yr.empty()) yr = {0.0, 1.0};
  xr.pad_if_flat(1.0);
  if (p.log_y) {
    yr.lo = std::floor(yr.lo);
    yr.hi = std::ceil(yr.hi);
    yr.pad_if_flat(1.0);
  } else {
    const double step = nice_step(yr.hi - yr.lo);
    yr.pad_if_flat(step);
    yr.lo = std::floor(yr.lo / step) * step;
    yr.hi = std::ceil(yr.hi / step) * step;
  }
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) {
    const double v = p.log_y ? std::log10(y) : y;
    return y0 + kTop + (1.0 - (v - yr.lo) / (yr.hi - yr.lo)) * ph;
  };

  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(y0 + 22)
      << "\" text-anchor=\"middle\" font-size=\"15\">" << escape(p.title) << "</text>\n";
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(y0 + kTop) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"#000\"/>\n";

  // Grid and ticks.
  const double xstep = nice_step(xr.hi - xr.lo);
  for (double x = std::ceil(xr.lo / xstep) * xstep; x <= xr.hi + 1e-9 * xstep; x += xstep) {
    out << "<line x1=\"" << num(sx(x)) << "\" y1=\"" << num(y0 + kTop) << "\" x2=\"" << num(sx(x)) << "\" y2=\""
        << num(y0 + kTop + ph) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(y0 + kTop + ph + 18)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << num(std::abs(x) < 1e-12 ? 0.0 : x) << "</text>\n";
  }
  if (p.log_y) {
    for (int e = static_cast<int>(yr.lo); e <= static_cast<int>(yr.hi); ++e) {
      const double y = std::pow(10.0, e);
      out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
          << num(sy(y)) << "\" stroke=\"#ddd\"/>\n";
      out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(y) + 4)
          << "\" text-anchor=\"end\" font-size=\"12\">1e" << e << "</text>\n";
    }
  } else {
    const double ystep = nice_step(yr.hi - yr.lo);
    for (double y = yr.lo; y <= yr.hi + 1e-9 * ystep; y += ystep) {
      out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
          << num(sy(y)) << "\" stroke=\"#ddd\"/>\n";
      out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(y) + 4)
          << "\" text-anchor=\"end\" font-size=\"12\">" << num(std::abs(y) < 1e-12 * ystep ? 0.0 : y)
          << "</text>\n";
    }
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(y0 + height - 12)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(p.xlabel) << "</text>\n";
  out << "<text transform=\"translate(18," << num(y0 + kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(p.ylabel) << "</text>\n";

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::ostringstream path;
    bool pen_down = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const bool ok = std::isfinite(s.x[i]) && std::isfinite(s.y[i]) && (!p.log_y || s.y[i] > 0);
      if (!ok) {
        pen_down = false;
        continue;
      }
      path << (pen_down ? " L" : " M") << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
      pen_down = true;
    }
    out << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (p.log_y && s.y[i] <= 0)) continue;
        const bool hollow = i < s.hollow.size() && s.hollow[i];
        out << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.y[i])) << "\" r=\"3.5\" stroke=\""
            << color << "\" fill=\"" << (hollow ? "#fff" : color) << "\"/>\n";
      }
    }
  }

  if (p.series.empty()) return;
  const double lx = kLeft + pw - 170;
  out << "<rect x=\"" << num(lx - 6) << "\" y=\"" << num(y0 + kTop + 4) << "\" width=\"170\" height=\""
      << num(18 * static_cast<double>(p.series.size()) + 6)
      << "\" fill=\"#fff\" fill-opacity=\"0.85\" stroke=\"#999\"/>\n";
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    const double ly = y0 + kTop + 18 + 18 * static_cast<double>(k);
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 24) << "\" y2=\""
        << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    out << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(ly) << "\" font-size=\"12\">" << escape(s.label)
        << "</text>\n";
  }
}

}  // namespace

std::string render(const std::vector<Panel>& panels, double width, double panel_height) {
  std::ostringstream out;
  const double height = panel_height * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    draw_panel(out, panels[i], panel_height * static_cast<double>(i), width, panel_height);
  out << "</svg>\n";
  return out.str();
}

}  // namespace uwfd::plot
