// SPDX-License-Identifier: Apache-2.0
#include "risfp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace risfp {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

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

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string column_text(const TrialRecord& r, const std::string& column) {
  if (column == "trial") return std::to_string(r.trial);
  if (column == "seed") return std::to_string(r.seed);
  if (column == "snr_db") return num(r.snr_db);
  if (column == "n_ris") return std::to_string(r.n_ris);
  if (column == "k_users") return std::to_string(r.k_users);
  if (column == "sigma_eps2") return num(r.sigma_eps2);
  if (column == "algorithm") return r.algorithm;
  if (column == "objective") return num(r.objective);
  if (column == "sum_rate") return num(r.sum_rate);
  if (column == "ee") return num(r.ee);
  if (column == "total_tx_power") return num(r.total_tx_power);
  if (column == "iters") return std::to_string(r.iters);
  if (column == "runtime_ms") return num(r.runtime_ms);
  if (column == "feasible") return r.feasible ? "1" : "0";
  if (column.rfind("rate_", 0) == 0) {
    const std::size_t k = std::stoul(column.substr(5));
    if (k >= 1 && k <= r.rates.size()) return num(r.rates[k - 1]);
    return "";
  }
  throw std::invalid_argument("unknown column '" + column + "'");
}

double column_value(const TrialRecord& r, const std::string& column) {
  if (column == "algorithm") throw std::invalid_argument("column 'algorithm' is not numeric");
  const std::string t = column_text(r, column);
  return t.empty() ? std::numeric_limits<double>::quiet_NaN() : std::strtod(t.c_str(), nullptr);
}

std::map<std::string, std::vector<SeriesPoint>> aggregate(const std::vector<TrialRecord>& records,
                                                          const PlotSpec& spec) {
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (const auto& r : records) {
    bool keep = true;
    for (const auto& [col, val] : spec.where) keep = keep && column_text(r, col) == val;
    if (!keep) continue;
    const double y = column_value(r, spec.y);
    if (!std::isfinite(y)) continue;
    groups[column_text(r, spec.series)][column_value(r, spec.x)].push_back(y);
  }
  std::map<std::string, std::vector<SeriesPoint>> out;
  for (const auto& [label, by_x] : groups) {
    for (const auto& [x, ys] : by_x) {
      SeriesPoint p;
      p.x = x;
      p.count = static_cast<int>(ys.size());
      for (double y : ys) p.mean += y;
      p.mean /= p.count;
      double ss = 0.0;
      for (double y : ys) ss += (y - p.mean) * (y - p.mean);
      p.stddev = p.count > 1 ? std::sqrt(ss / (p.count - 1)) : 0.0;
      out[label].push_back(p);
    }
  }
  return out;
}

std::string plot_svg(const std::vector<TrialRecord>& records, const PlotSpec& spec) {
  const auto series = aggregate(records, spec);
  if (series.empty()) throw std::invalid_argument("plot: no finite data for y = '" + spec.y + "'");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& [label, pts] : series)
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.mean - p.stddev);
      y1 = std::max(y1, p.mean + p.stddev);
    }
  if (x1 == x0) { x0 -= 1.0; x1 += 1.0; }
  if (y1 == y0) { y0 -= 1.0; y1 += 1.0; }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double w = 640, h = 420, left = 70, right = 170, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string title = spec.title.empty() ? spec.y + " vs " + spec.x : spec.title;
  s << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0;
    const double yv = y0 + (y1 - y0) * i / 5.0;
    s << "<line x1=\"" << sx(xv) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(xv) << "\" y2=\"" << top + ph + 5
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << short_num(xv)
      << "</text>\n";
    s << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << left << "\" y2=\"" << sy(yv)
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << short_num(yv)
      << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">" << escape(spec.x)
    << "</text>\n";
  s << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(spec.y) << "</text>\n";

  int idx = 0;
  for (const auto& [label, pts] : series) {
    const char* colour = kPalette[idx % 8];
    s << "<g stroke=\"" << colour << "\" fill=\"" << colour << "\">\n<polyline fill=\"none\" stroke-width=\"2\" points=\"";
    for (const auto& p : pts) s << sx(p.x) << ',' << sy(p.mean) << ' ';
    s << "\"/>\n";
    for (const auto& p : pts) {
      s << "<line x1=\"" << sx(p.x) << "\" y1=\"" << sy(p.mean - p.stddev) << "\" x2=\"" << sx(p.x) << "\" y2=\""
        << sy(p.mean + p.stddev) << "\"/>\n";
      s << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.mean) << "\" r=\"3\"/>\n";
    }
    const double ly = top + 10 + 18 * idx;
    s << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
      << "\" stroke-width=\"2\"/>\n";
    s << "</g>\n<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << escape(spec.series) << '='
      << escape(label) << "</text>\n";
    ++idx;
  }
  s << "</svg>\n";
  return s.str();
}

void emit_plot(const std::filesystem::path& csv, const PlotSpec& spec, const std::filesystem::path& out) {
  const std::string svg = plot_svg(read_csv(csv), spec);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out.string());
  f << svg;
}

}  // namespace risfp
