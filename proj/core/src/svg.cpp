#include "projsel/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace projsel::svg {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string esc(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (lo == hi) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

class Canvas {
 public:
  Canvas(const Axes& axes, Range x, Range y) : axes_(axes), x_(x), y_(y) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
         << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
         << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
         << esc(axes.title) << "</text>\n"
         << "<text x=\"" << kLeft + (kWidth - kLeft - kRight) / 2 << "\" y=\"" << kHeight - 12
         << "\" text-anchor=\"middle\">" << esc(axes.xlabel) << "</text>\n"
         << "<text transform=\"translate(16," << kTop + (kHeight - kTop - kBottom) / 2
         << ") rotate(-90)\" text-anchor=\"middle\">" << esc(axes.ylabel) << "</text>\n"
         << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
         << "\" height=\"" << kHeight - kTop - kBottom
         << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
      const double v = y_.lo + (y_.hi - y_.lo) * k / 5.0;
      out_ << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(v) + 4)
           << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
    if (axes.zero_line && y_.lo < 0 && y_.hi > 0)
      out_ << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << num(py(0))
           << "\" y2=\"" << num(py(0)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }

  double px(double v) const {
    return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight);
  }
  double py(double v) const {
    return kTop + (y_.hi - v) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom);
  }
  void x_tick(double v, const std::string& label) {
    out_ << "<text x=\"" << num(px(v)) << "\" y=\"" << kHeight - kBottom + 16
         << "\" text-anchor=\"middle\">" << esc(label) << "</text>\n";
  }
  std::ostringstream& raw() { return out_; }
  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  Axes axes_;
  Range x_, y_;
  std::ostringstream out_;
};

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::string line_plot(const Axes& axes, const std::vector<Series>& series) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();
  Canvas c(axes, xr, yr);
  const double first = std::ceil(xr.lo), last = std::floor(xr.hi);
  const double step = std::max(1.0, std::ceil((last - first) / 10.0));
  for (double v = first; v <= last; v += step) c.x_tick(v, num(v));

  const bool crowded = series.size() > 8;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[crowded ? 0 : k % 8];
    auto& out = c.raw();
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\""
        << (crowded ? "0.8" : "1.8") << "\"" << (crowded ? " stroke-opacity=\"0.4\"" : "")
        << " points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (std::isfinite(s.y[i])) out << num(c.px(s.x[i])) << ',' << num(c.py(s.y[i])) << ' ';
    out << "\"/>\n";
    if (!crowded) {
      out << "<text x=\"" << kWidth - kRight - 6 << "\" y=\"" << kTop + 16 + 14.0 * static_cast<double>(k)
          << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << esc(s.name) << "</text>\n";
    }
  }
  return c.finish();
}

std::string box_plot(const Axes& axes,
                     const std::vector<std::pair<std::string, std::vector<double>>>& groups) {
  Range xr, yr;
  xr.lo = 0.5;
  xr.hi = static_cast<double>(groups.size()) + 0.5;
  for (const auto& [label, v] : groups)
    for (double y : v) yr.add(y);
  yr.finish();
  Canvas c(axes, xr, yr);
  const double half = std::min(20.0, 0.3 * (c.px(1.0) - c.px(0.0)));
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const double x = static_cast<double>(k + 1);
    c.x_tick(x, groups[k].first);
    std::vector<double> v;
    for (double y : groups[k].second)
      if (std::isfinite(y)) v.push_back(y);
    if (v.empty()) continue;
    const double q0 = quantile(v, 0), q1 = quantile(v, 0.25), q2 = quantile(v, 0.5),
                 q3 = quantile(v, 0.75), q4 = quantile(v, 1);
    auto& out = c.raw();
    const double cx = c.px(x);
    out << "<line x1=\"" << num(cx) << "\" x2=\"" << num(cx) << "\" y1=\"" << num(c.py(q0))
        << "\" y2=\"" << num(c.py(q4)) << "\" stroke=\"black\"/>\n"
        << "<rect x=\"" << num(cx - half) << "\" y=\"" << num(c.py(q3)) << "\" width=\""
        << num(2 * half) << "\" height=\"" << num(c.py(q1) - c.py(q3))
        << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n"
        << "<line x1=\"" << num(cx - half) << "\" x2=\"" << num(cx + half) << "\" y1=\""
        << num(c.py(q2)) << "\" y2=\"" << num(c.py(q2)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  return c.finish();
}

std::string bar_plot(const Axes& axes, const std::vector<std::pair<std::string, double>>& bars) {
  Range xr, yr;
  xr.lo = 0.5;
  xr.hi = static_cast<double>(bars.size()) + 0.5;
  yr.add(0.0);
  for (const auto& [label, v] : bars) yr.add(v);
  yr.finish();
  Canvas c(axes, xr, yr);
  const double half = 0.35 * (c.px(1.0) - c.px(0.0));
  for (std::size_t k = 0; k < bars.size(); ++k) {
    const double x = static_cast<double>(k + 1);
    c.x_tick(x, bars[k].first);
    const double top = c.py(std::max(0.0, bars[k].second));
    const double bottom = c.py(std::min(0.0, bars[k].second));
    c.raw() << "<rect x=\"" << num(c.px(x) - half) << "\" y=\"" << num(top) << "\" width=\""
            << num(2 * half) << "\" height=\"" << num(bottom - top)
            << "\" fill=\"#1f77b4\"/>\n";
  }
  return c.finish();
}

}  // namespace projsel::svg
