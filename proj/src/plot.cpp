#include "drsafe/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <ostream>

namespace drsafe::plot {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double map(double v) const { return log ? std::log10(v) : v; }
  void include(double v) {
    lo = std::min(lo, map(v));
    hi = std::max(hi, map(v));
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
  double unit(double v) const { return (map(v) - lo) / (hi - lo); }
  std::string label(double mapped) const {
    return log ? fmt::format("1e{:.3g}", mapped) : fmt::format("{:.4g}", mapped);
  }
};

}  // namespace

void write_line_chart(std::ostream& out, const std::vector<Series>& series,
                      const ChartOptions& opts) {
  Axis ax{opts.log_x}, ay{opts.log_y};
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (ax.usable(s.x[i]) && ay.usable(s.y[i])) ax.include(s.x[i]), ay.include(s.y[i]);
  ax.finish();
  ay.finish();

  const double left = 70, right = 150, top = 40, bottom = 50;
  double pw = opts.width - left - right, ph = opts.height - top - bottom;
  if (opts.equal_aspect) {
    const double scale = std::min(pw / (ax.hi - ax.lo), ph / (ay.hi - ay.lo));
    pw = scale * (ax.hi - ax.lo);
    ph = scale * (ay.hi - ay.lo);
  }
  auto px = [&](double v) { return left + ax.unit(v) * pw; };
  auto py = [&](double v) { return top + (1.0 - ay.unit(v)) * ph; };

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      opts.width, opts.height);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << fmt::format("<text x=\"{}\" y=\"22\" font-size=\"14\">{}</text>\n", left,
                     escape(opts.title));
  out << fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      left, top, pw, ph);
  out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", left, top + ph + 18,
                     ax.label(ax.lo));
  out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n",
                     left + pw, top + ph + 18, ax.label(ax.hi));
  out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", left - 6,
                     top + ph, ay.label(ay.lo));
  out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", left - 6,
                     top + 10, ay.label(ay.hi));
  out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                     left + pw / 2, top + ph + 38, escape(opts.x_label));
  out << fmt::format(
      "<text x=\"16\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">{}"
      "</text>\n",
      top + ph / 2, top + ph / 2, escape(opts.y_label));

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"",
                       color);
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (ax.usable(s.x[i]) && ay.usable(s.y[i]))
        out << fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
    out << "\"/>\n";
    const double ly = top + 14 + 18 * static_cast<double>(k);
    out << fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
        "stroke-width=\"2\"/>\n",
        left + pw + 12, ly - 4, left + pw + 32, ly - 4, color);
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", left + pw + 38, ly,
                       escape(s.label));
  }
  out << "</svg>\n";
}

}  // namespace drsafe::plot
