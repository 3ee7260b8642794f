#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "inrad/errors.hpp"

namespace inrad::cli::svg {
namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 360;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

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

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

void header(std::ofstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
}

}  // namespace

void write_line_plot(const LinePlot& plot, const std::filesystem::path& path) {
  auto fx = [&](double x) { return plot.log_x ? std::log10(std::max(x, 1e-300)) : x; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series) {
    for (double x : s.x) x0 = std::min(x0, fx(x)), x1 = std::max(x1, fx(x));
    for (double y : s.y) y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  if (plot.hline) y0 = std::min(y0, *plot.hline), y1 = std::max(y1, *plot.hline);
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (fx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  auto out = open(path);
  header(out, plot.title);
  for (const auto& [a, b] : plot.shaded) {
    out << "<rect x=\"" << num(px(a)) << "\" y=\"" << kTop << "\" width=\""
        << num(std::max(1.0, px(b) - px(a))) << "\" height=\"" << ph
        << "\" fill=\"#f4a6a6\" opacity=\"0.5\"/>\n";
  }
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = y0 + (y1 - y0) * i / 4.0;
    const double xv = x0 + (x1 - x0) * i / 4.0;
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">"
        << label_num(yv) << "</text>\n";
    out << "<text x=\"" << num(kLeft + pw * i / 4.0) << "\" y=\"" << kTop + ph + 16
        << "\" text-anchor=\"middle\">" << label_num(plot.log_x ? std::pow(10.0, xv) : xv)
        << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + ph / 2 << ")\">" << escape(plot.y_label) << "</text>\n";
  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const auto& s = plot.series[i];
    const char* color = kColors[i % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      out << num(px(s.x[k])) << ',' << num(py(s.y[k])) << ' ';
    }
    out << "\"/>\n";
    if (!s.name.empty()) {
      out << "<text x=\"" << kLeft + pw - 6 << "\" y=\"" << kTop + 14 + 14 * i
          << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(s.name) << "</text>\n";
    }
  }
  if (plot.hline) {
    out << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << num(py(*plot.hline))
        << "\" y2=\"" << num(py(*plot.hline)) << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
  }
  out << "</svg>\n";
}

void write_bar_plot(const std::string& title, const std::string& y_label,
                    const std::vector<std::string>& labels, const std::vector<double>& values,
                    const std::filesystem::path& path) {
  double top = 0.0;
  for (double v : values) top = std::max(top, v);
  if (top <= 0.0) top = 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const double slot = pw / static_cast<double>(std::max<std::size_t>(1, values.size()));

  auto out = open(path);
  header(out, title);
  out << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << kTop + ph << "\" y2=\""
      << kTop + ph << "\" stroke=\"black\"/>\n";
  out << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + ph / 2 << ")\">" << escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double h = values[i] / top * ph;
    const double x = kLeft + slot * static_cast<double>(i) + slot * 0.2;
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(kTop + ph - h) << "\" width=\""
        << num(slot * 0.6) << "\" height=\"" << num(h) << "\" fill=\"" << kColors[i % std::size(kColors)]
        << "\"/>\n";
    out << "<text x=\"" << num(x + slot * 0.3) << "\" y=\"" << num(kTop + ph - h - 4)
        << "\" text-anchor=\"middle\">" << label_num(values[i]) << "</text>\n";
    out << "<text x=\"" << num(x + slot * 0.3) << "\" y=\"" << kTop + ph + 16
        << "\" text-anchor=\"middle\">" << escape(i < labels.size() ? labels[i] : "") << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace inrad::cli::svg
