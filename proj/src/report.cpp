// Copyright 2026 The coalflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "coalflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "coalflow/errors.hpp"

namespace coalflow {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

}  // namespace

std::string render_svg(const std::vector<SweepRow>& rows,
                       const ChartOptions& opts) {
  if (rows.empty()) throw InputError("report: no rows");
  std::map<std::string, std::vector<const SweepRow*>> series;
  std::vector<std::string> order;
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = 0.0;
  double y1 = 0.0;
  for (const SweepRow& r : rows) {
    if (!series.contains(r.solver)) order.push_back(r.solver);
    series[r.solver].push_back(&r);
    x0 = std::min(x0, r.level);
    x1 = std::max(x1, r.level);
    y0 = std::min(y0, r.mean_reward - r.std_reward);
    y1 = std::max(y1, r.mean_reward + r.std_reward);
  }
  if (x1 - x0 < 1e-12) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 < 1e-12) y1 = y0 + 1.0;
  y1 += 0.05 * (y1 - y0);

  const double left = 64, right = 150, top = 40, bottom = 52;
  const double pw = opts.width - left - right;
  const double ph = opts.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width
     << "\" height=\"" << opts.height << "\" font-family=\"sans-serif\" "
     << "font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << opts.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
     << "font-size=\"15\">" << escape(opts.title) << "</text>\n";
  // Axes and ticks.
  os << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\""
     << num(left + pw) << "\" y2=\"" << num(top + ph) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\""
     << num(left) << "\" y2=\"" << num(top + ph) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0;
    const double yv = y0 + (y1 - y0) * i / 5.0;
    char lx[32], ly[32];
    std::snprintf(lx, sizeof lx, "%g", std::round(xv * 1000) / 1000);
    std::snprintf(ly, sizeof ly, "%g", std::round(yv * 100) / 100);
    os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(top + ph + 18)
       << "\" text-anchor=\"middle\">" << lx << "</text>\n";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(yv) + 4)
       << "\" text-anchor=\"end\">" << ly << "</text>\n";
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(yv)) << "\" x2=\""
       << num(left + pw) << "\" y2=\"" << num(py(yv))
       << "\" stroke=\"#ddd\"/>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << opts.height - 12
     << "\" text-anchor=\"middle\">" << escape(opts.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << num(top + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(opts.y_label)
     << "</text>\n";

  for (std::size_t s = 0; s < order.size(); ++s) {
    auto pts = series[order[s]];
    std::sort(pts.begin(), pts.end(),
              [](const SweepRow* a, const SweepRow* b) { return a->level < b->level; });
    const char* color = kPalette[s % std::size(kPalette)];
    std::string band;
    for (const SweepRow* r : pts) {
      band += num(px(r->level)) + "," + num(py(r->mean_reward + r->std_reward)) + " ";
    }
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      band += num(px((*it)->level)) + "," +
              num(py((*it)->mean_reward - (*it)->std_reward)) + " ";
    }
    os << "<polygon points=\"" << band << "\" fill=\"" << color
       << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    std::string line;
    for (const SweepRow* r : pts) {
      line += num(px(r->level)) + "," + num(py(r->mean_reward)) + " ";
    }
    os << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    for (const SweepRow* r : pts) {
      os << "<circle cx=\"" << num(px(r->level)) << "\" cy=\""
         << num(py(r->mean_reward)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 16 + 20.0 * s;
    os << "<line x1=\"" << num(left + pw + 14) << "\" y1=\"" << num(ly)
       << "\" x2=\"" << num(left + pw + 36) << "\" y2=\"" << num(ly)
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(ly + 4)
       << "\">" << escape(order[s]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace coalflow
