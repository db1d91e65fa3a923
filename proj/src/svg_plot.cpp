#include "zonalstab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace zonal::plot {

namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

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

struct Axis {
  bool log = false;
  double lo = 0.0;  // in transformed units
  double hi = 1.0;

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0); }
  double tf(double v) const { return log ? std::log10(v) : v; }
};

Axis make_axis(const std::vector<Series>& series, bool use_x, bool log) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Series& s : series) {
    const auto& v = use_x ? s.x : s.y;
    for (double d : v) {
      if (!a.usable(d)) continue;
      lo = std::min(lo, a.tf(d));
      hi = std::max(hi, a.tf(d));
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi == lo) {
    const double pad = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

// Ticks in data units.
std::vector<double> ticks(const Axis& a) {
  std::vector<double> t;
  if (a.log) {
    for (double e = std::ceil(a.lo); e <= std::floor(a.hi) + 1e-9; e += 1.0) t.push_back(std::pow(10.0, e));
    if (t.size() > 12) {
      std::vector<double> thin;
      const std::size_t stride = (t.size() + 9) / 10;
      for (std::size_t i = 0; i < t.size(); i += stride) thin.push_back(t[i]);
      t = thin;
    }
    if (t.empty()) {
      t.push_back(std::pow(10.0, a.lo));
      t.push_back(std::pow(10.0, a.hi));
    }
    return t;
  }
  const double span = a.hi - a.lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (raw <= step) break;
  }
  for (double v = std::ceil(a.lo / step) * step; v <= a.hi + 1e-9 * span; v += step)
    t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, const PlotOptions& opts) {
  const double W = opts.width;
  const double H = opts.height;
  const double left = 70, right = 20, top = 40, bottom = 55;
  const double pw = W - left - right;
  const double ph = H - top - bottom;
  const Axis ax = make_axis(series, true, opts.logx);
  const Axis ay = make_axis(series, false, opts.logy);
  auto px = [&](double v) { return left + (ax.tf(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return top + ph - (ay.tf(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\"" << opts.height
    << "\" viewBox=\"0 0 " << opts.width << ' ' << opts.height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty())
    s << "<text x=\"" << num(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(opts.title)
      << "</text>\n";
  s << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  s << "<g font-size=\"11\">\n";
  for (double t : ticks(ax)) {
    const double x = px(t);
    s << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x) << "\" y2=\""
      << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">" << label(t)
      << "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double y = py(t);
    s << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left) << "\" y2=\"" << num(y)
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << label(t)
      << "</text>\n";
  }
  s << "</g>\n";
  if (!opts.xlabel.empty())
    s << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 12) << "\" text-anchor=\"middle\" font-size=\"13\">"
      << escape(opts.xlabel) << "</text>\n";
  if (!opts.ylabel.empty())
    s << "<text transform=\"translate(16," << num(top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(opts.ylabel) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& sr = series[k];
    const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
      pts.clear();
    };
    const std::size_t n = std::min(sr.x.size(), sr.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!ax.usable(sr.x[i]) || !ay.usable(sr.y[i])) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += num(px(sr.x[i])) + "," + num(py(sr.y[i]));
    }
    flush();
    if (!sr.label.empty()) {
      const double ly = top + 14 + 16.0 * static_cast<double>(k);
      s << "<line x1=\"" << num(left + pw - 110) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(left + pw - 90)
        << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      s << "<text x=\"" << num(left + pw - 85) << "\" y=\"" << num(ly) << "\" font-size=\"11\">" << escape(sr.label)
        << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace zonal::plot
