#include "rmcf/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rmcf/error.hpp"

namespace rmcf {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 48.0;
constexpr int kTicks = 5;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string px(double v) { return fmt("%.2f", v); }

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

struct Range {
  double lo, hi;
};

Range padded(double lo, double hi) {
  if (hi > lo) return {lo, hi};
  const double pad = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
  return {lo - pad, hi + pad};
}

}  // namespace

bool is_decay_quantity(const std::string& c) {
  static const std::vector<std::string> decay{"maxE",      "maxGradRm",    "maxFsigma", "maxGradH2",
                                              "maxA2",     "maxTraceless", "maxE_ambient"};
  return std::find(decay.begin(), decay.end(), c) != decay.end();
}

std::vector<PlotSpec> default_plot_specs(const CsvTable& table) {
  std::vector<PlotSpec> specs;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    const std::string& c = table.columns[i];
    if (c == "t") continue;
    bool positive = true;
    for (const auto& row : table.rows) positive = positive && row[i] > 0.0;
    specs.push_back({c, is_decay_quantity(c) && positive});
  }
  return specs;
}

std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
  const std::size_t ti = table.column("t");
  const std::size_t ci = table.column(spec.column);
  if (table.rows.size() < 2) throw InvalidArgument("plot needs at least two rows");

  std::vector<double> t, y;
  for (const auto& row : table.rows) {
    double v = row[ci];
    if (spec.log_scale) {
      if (!(v > 0.0)) throw InvalidArgument("log plot of '" + spec.column + "' has a non-positive value");
      v = std::log10(v);
    }
    t.push_back(row[ti]);
    y.push_back(v);
  }
  const Range tr = padded(*std::min_element(t.begin(), t.end()), *std::max_element(t.begin(), t.end()));
  const Range yr = padded(*std::min_element(y.begin(), y.end()), *std::max_element(y.begin(), y.end()));
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto X = [&](double v) { return kLeft + (v - tr.lo) / (tr.hi - tr.lo) * pw; };
  auto Y = [&](double v) { return kTop + (yr.hi - v) / (yr.hi - yr.lo) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << px(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.column)
    << (spec.log_scale ? " (log10)" : "") << "</text>\n";
  s << "<g stroke=\"black\" stroke-width=\"1\">\n";
  s << "<line x1=\"" << px(kLeft) << "\" y1=\"" << px(kTop + ph) << "\" x2=\"" << px(kLeft + pw) << "\" y2=\""
    << px(kTop + ph) << "\"/>\n";
  s << "<line x1=\"" << px(kLeft) << "\" y1=\"" << px(kTop) << "\" x2=\"" << px(kLeft) << "\" y2=\"" << px(kTop + ph)
    << "\"/>\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double tv = tr.lo + (tr.hi - tr.lo) * i / kTicks;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    s << "<line x1=\"" << px(X(tv)) << "\" y1=\"" << px(kTop + ph) << "\" x2=\"" << px(X(tv)) << "\" y2=\""
      << px(kTop + ph + 5) << "\"/>\n";
    s << "<line x1=\"" << px(kLeft - 5) << "\" y1=\"" << px(Y(yv)) << "\" x2=\"" << px(kLeft) << "\" y2=\""
      << px(Y(yv)) << "\"/>\n";
  }
  s << "</g>\n<g fill=\"black\">\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double tv = tr.lo + (tr.hi - tr.lo) * i / kTicks;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    s << "<text x=\"" << px(X(tv)) << "\" y=\"" << px(kTop + ph + 18) << "\" text-anchor=\"middle\">"
      << fmt("%.4g", tv) << "</text>\n";
    s << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(Y(yv) + 4) << "\" text-anchor=\"end\">"
      << (spec.log_scale ? "1e" + fmt("%.3g", yv) : fmt("%.4g", yv)) << "</text>\n";
  }
  s << "<text x=\"" << px(kLeft + pw / 2) << "\" y=\"" << px(kHeight - 8) << "\" text-anchor=\"middle\">t</text>\n";
  s << "</g>\n<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < t.size(); ++i) s << (i ? " " : "") << px(X(t[i])) << ',' << px(Y(y[i]));
  s << "\"/>\n</svg>\n";
  return s.str();
}

std::vector<std::string> emit_plots(const CsvTable& table, const std::vector<PlotSpec>& specs, const std::string& dir,
                                    const std::string& stem) {
  for (const auto& spec : specs) table.column(spec.column);
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  for (const auto& spec : specs) {
    const std::string svg = render_svg(table, spec);
    const std::string path = (std::filesystem::path(dir) / (stem + "_" + spec.column + ".svg")).string();
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << svg;
    paths.push_back(path);
  }
  return paths;
}

}  // namespace rmcf
