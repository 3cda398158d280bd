// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "swan/harness/csv.hpp"
#include "swan/harness/experiment.hpp"

namespace swan::harness::svg {

struct PlotOptions {
  bool log_y = false;
  std::string title;
  std::string x_label = "sweep value";
  std::string y_label = "mean MSE";
};

/// Maps data coordinates onto the canvas. The plot box spans exactly the
/// data range (decades when log_y).
struct PlotFrame {
  static constexpr double kWidth = 760.0;
  static constexpr double kHeight = 480.0;
  static constexpr double kLeft = 80.0;
  static constexpr double kRight = 560.0;
  static constexpr double kTop = 50.0;
  static constexpr double kBottom = 420.0;

  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;  // log10 units when log_y
  bool log_y = false;

  [[nodiscard]] double px(double x) const { return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft); }
  [[nodiscard]] double py(double y) const {
    const double v = log_y ? std::log10(std::max(y, std::numeric_limits<double>::min())) : y;
    return kBottom - (v - y_min) / (y_max - y_min) * (kBottom - kTop);
  }
};

struct Series {
  std::string label;
  double kappa = 0.0;
  std::vector<std::pair<double, double>> points;
};

inline std::string series_label(const std::string& scheme, double kappa) {
  char buf[48];
  std::snprintf(buf, sizeof buf, " kappa=%g", kappa);
  return scheme + buf;
}

/// One series per (scheme, kappa), points ordered by sweep value.
inline std::vector<Series> build_series(const std::vector<AggregateRow>& agg) {
  std::map<std::tuple<std::string, double>, Series> by_key;
  std::vector<std::tuple<std::string, double>> order;
  for (const auto& a : agg) {
    const auto key = std::make_tuple(a.scheme, a.kappa);
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      it = by_key.emplace(key, Series{series_label(a.scheme, a.kappa), a.kappa, {}}).first;
      order.push_back(key);
    }
    it->second.points.emplace_back(a.sweep_value, a.mean_mse);
  }
  std::vector<Series> out;
  for (const auto& k : order) {
    auto s = by_key[k];
    std::sort(s.points.begin(), s.points.end());
    out.push_back(std::move(s));
  }
  return out;
}

inline PlotFrame make_frame(const std::vector<AggregateRow>& agg, bool log_y) {
  if (agg.empty()) throw std::invalid_argument("emit_plot: no aggregates to plot");
  PlotFrame f;
  f.log_y = log_y;
  f.x_min = f.y_min = std::numeric_limits<double>::infinity();
  f.x_max = f.y_max = -std::numeric_limits<double>::infinity();
  for (const auto& a : agg) {
    f.x_min = std::min(f.x_min, a.sweep_value);
    f.x_max = std::max(f.x_max, a.sweep_value);
    const double y = log_y ? std::log10(std::max(a.mean_mse, std::numeric_limits<double>::min())) : a.mean_mse;
    f.y_min = std::min(f.y_min, y);
    f.y_max = std::max(f.y_max, y);
  }
  if (log_y) {
    f.y_min = std::floor(f.y_min);
    f.y_max = std::ceil(f.y_max);
  }
  if (f.x_max == f.x_min) {
    f.x_min -= 0.5;
    f.x_max += 0.5;
  }
  if (f.y_max == f.y_min) {
    const double pad = f.y_min == 0.0 ? 1.0 : 0.5 * std::fabs(f.y_min);
    f.y_min -= pad;
    f.y_max += pad;
  }
  return f;
}

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                           "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace detail

inline std::string render(const std::vector<AggregateRow>& agg, const PlotOptions& opt) {
  using detail::num;
  const PlotFrame f = make_frame(agg, opt.log_y);
  const auto series = build_series(agg);
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(PlotFrame::kWidth) + "\" height=\"" +
       num(PlotFrame::kHeight) + "\" viewBox=\"0 0 " + num(PlotFrame::kWidth) + " " + num(PlotFrame::kHeight) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    s += "<text x=\"" + num(0.5 * (PlotFrame::kLeft + PlotFrame::kRight)) + "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" + detail::escape(opt.title) + "</text>\n";
  s += "<rect class=\"frame\" x=\"" + num(PlotFrame::kLeft) + "\" y=\"" + num(PlotFrame::kTop) + "\" width=\"" +
       num(PlotFrame::kRight - PlotFrame::kLeft) + "\" height=\"" + num(PlotFrame::kBottom - PlotFrame::kTop) +
       "\" fill=\"none\" stroke=\"black\"/>\n";

  // x ticks at the distinct sweep values (at most 12 labelled).
  std::vector<double> xs;
  for (const auto& a : agg) xs.push_back(a.sweep_value);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const std::size_t stride = std::max<std::size_t>(1, (xs.size() + 11) / 12);
  for (std::size_t i = 0; i < xs.size(); i += stride) {
    const double x = f.px(xs[i]);
    s += "<line class=\"tick\" x1=\"" + num(x) + "\" y1=\"" + num(PlotFrame::kBottom) + "\" x2=\"" + num(x) +
         "\" y2=\"" + num(PlotFrame::kBottom + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x) + "\" y=\"" + num(PlotFrame::kBottom + 20) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + detail::tick_label(xs[i]) + "</text>\n";
  }
  // y ticks: decades for log scale, five even steps otherwise.
  std::vector<double> ys;
  if (opt.log_y) {
    for (double e = f.y_min; e <= f.y_max + 1e-9; e += 1.0) ys.push_back(std::pow(10.0, e));
  } else {
    for (int i = 0; i <= 4; ++i) ys.push_back(f.y_min + (f.y_max - f.y_min) * i / 4.0);
  }
  for (double yv : ys) {
    const double y = f.py(yv);
    s += "<line class=\"tick\" x1=\"" + num(PlotFrame::kLeft - 5) + "\" y1=\"" + num(y) + "\" x2=\"" +
         num(PlotFrame::kLeft) + "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(PlotFrame::kLeft - 8) + "\" y=\"" + num(y + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + detail::tick_label(yv) + "</text>\n";
  }
  s += "<text x=\"" + num(0.5 * (PlotFrame::kLeft + PlotFrame::kRight)) + "\" y=\"" + num(PlotFrame::kBottom + 45) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + detail::escape(opt.x_label) + "</text>\n";
  s += "<text x=\"20\" y=\"" + num(0.5 * (PlotFrame::kTop + PlotFrame::kBottom)) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 " +
       num(0.5 * (PlotFrame::kTop + PlotFrame::kBottom)) + ")\">" +
       detail::escape(opt.y_label + (opt.log_y ? " (log)" : "")) + "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& sr = series[i];
    const std::string color = detail::kPalette[i % std::size(detail::kPalette)];
    const std::string dash = sr.kappa > 0.0 ? " stroke-dasharray=\"6 4\"" : "";
    std::string pts;
    for (const auto& [x, y] : sr.points) {
      if (!pts.empty()) pts += ' ';
      pts += num(f.px(x)) + "," + num(f.py(y));
    }
    s += "<polyline class=\"series\" data-label=\"" + detail::escape(sr.label) + "\" points=\"" + pts +
         "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"" + dash + "/>\n";
    const double ly = PlotFrame::kTop + 10 + 20.0 * static_cast<double>(i);
    s += "<line class=\"legend\" x1=\"" + num(PlotFrame::kRight + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" +
         num(PlotFrame::kRight + 45) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"" + dash + "/>\n";
    s += "<text x=\"" + num(PlotFrame::kRight + 52) + "\" y=\"" + num(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + detail::escape(sr.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

/// Writes a standalone SVG line chart; throws before touching the file
/// system when there is nothing to plot.
inline void emit_plot(const std::vector<AggregateRow>& agg, const std::filesystem::path& path,
                      const PlotOptions& opt = {}) {
  const std::string content = render(agg, opt);
  csv::write_file(path, content);
}

}  // namespace swan::harness::svg
