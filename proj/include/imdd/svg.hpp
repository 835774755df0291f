// Copyright 2026 The imdd Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "imdd/ber.hpp"
#include "imdd/io.hpp"

namespace imdd {

// Self-contained SVG of BER curves over the noise grid: log BER on y,
// credibility-interval whiskers per point, open markers for censored
// measurements and a dashed rule at the target BER.
inline void write_ber_svg(std::ostream& os, const std::vector<BerRecord>& records,
                          double target_ber = 2e-3) {
  const double W = 860, H = 560;
  const double L = 80, R = 190, T = 30, B = 60;
  const double plot_w = W - L - R, plot_h = H - T - B;

  std::map<std::string, std::vector<BerRecord>> curves;
  double x_min = 1e300, x_max = -1e300;
  double y_min_log = 0.0;  // log10 of the smallest positive plotted value
  for (const BerRecord& r : records) {
    curves[r.demapper].push_back(r);
    x_min = std::min(x_min, r.noise_db);
    x_max = std::max(x_max, r.noise_db);
    if (r.ber > 0) y_min_log = std::min(y_min_log, std::log10(r.ber));
    if (r.ci_low > 0) y_min_log = std::min(y_min_log, std::log10(r.ci_low));
  }
  if (curves.empty()) {
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='200' height='40'>"
       << "<text x='10' y='25'>no data</text></svg>\n";
    return;
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  const double y_top_log = 0.0;  // BER 1
  const double y_bot_log = std::floor(std::min(y_min_log, std::log10(target_ber))) - 0.5;

  const auto X = [&](double db) { return L + (db - x_min) / (x_max - x_min) * plot_w; };
  const auto Y = [&](double ber) {
    const double l = ber > 0 ? std::max(std::log10(ber), y_bot_log) : y_bot_log;
    return T + (y_top_log - l) / (y_top_log - y_bot_log) * plot_h;
  };

  const std::vector<std::pair<std::string, std::string>> palette = {
      {"LE1", "#8c8c8c"}, {"LE7", "#1f77b4"}, {"VNLE", "#2ca02c"},
      {"ANN", "#ff7f0e"}, {"SNN", "#d62728"}};
  const auto color_of = [&](const std::string& name) -> std::string {
    for (const auto& [n, c] : palette)
      if (n == name) return c;
    static const char* extra[] = {"#9467bd", "#17becf", "#bcbd22", "#e377c2"};
    size_t pos = 0;
    for (const auto& [n, curve] : curves) {
      bool known = false;
      for (const auto& [pn, pc] : palette) known |= pn == n;
      if (n == name && !known) break;
      if (!known) ++pos;
    }
    return extra[pos % 4];
  };

  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
     << "' viewBox='0 0 " << W << ' ' << H << "'>\n";
  os << "<rect width='" << W << "' height='" << H << "' fill='white'/>\n";
  os << "<g font-family='sans-serif' font-size='13'>\n";

  // Axes frame and grid.
  os << "<rect x='" << L << "' y='" << T << "' width='" << plot_w << "' height='"
     << plot_h << "' fill='none' stroke='#333'/>\n";
  const double x_step = (x_max - x_min) > 14 ? 2.0 : 1.0;
  for (double db = std::ceil(x_min); db <= x_max + 1e-9; db += x_step) {
    const double x = X(db);
    os << "<line x1='" << x << "' y1='" << T << "' x2='" << x << "' y2='" << (T + plot_h)
       << "' stroke='#ddd'/>\n";
    os << "<text x='" << x << "' y='" << (T + plot_h + 18)
       << "' text-anchor='middle'>" << db << "</text>\n";
  }
  for (double l = y_top_log; l >= y_bot_log - 1e-9; l -= 1.0) {
    const double y = T + (y_top_log - l) / (y_top_log - y_bot_log) * plot_h;
    os << "<line x1='" << L << "' y1='" << y << "' x2='" << (L + plot_w) << "' y2='" << y
       << "' stroke='#ddd'/>\n";
    os << "<text x='" << (L - 8) << "' y='" << (y + 4) << "' text-anchor='end'>1e"
       << static_cast<int>(l) << "</text>\n";
  }
  os << "<text x='" << (L + plot_w / 2) << "' y='" << (H - 16)
     << "' text-anchor='middle'>noise power [dB]</text>\n";
  os << "<text x='22' y='" << (T + plot_h / 2)
     << "' text-anchor='middle' transform='rotate(-90 22 " << (T + plot_h / 2)
     << ")'>bit error rate</text>\n";

  // Target BER rule.
  os << "<line x1='" << L << "' y1='" << Y(target_ber) << "' x2='" << (L + plot_w)
     << "' y2='" << Y(target_ber) << "' stroke='#888' stroke-dasharray='6 4'/>\n";
  os << "<text x='" << (L + 6) << "' y='" << (Y(target_ber) - 5)
     << "' fill='#666'>target " << fmt_g(target_ber) << "</text>\n";

  // Curves.
  for (auto& [name, curve] : curves) {
    std::sort(curve.begin(), curve.end(),
              [](const BerRecord& a, const BerRecord& b) { return a.noise_db < b.noise_db; });
    const std::string col = color_of(name);
    std::string path;
    bool open = false;
    for (const BerRecord& r : curve) {
      if (r.ber <= 0) {
        open = false;
        continue;
      }
      path += (open ? " L" : (path.empty() ? "M" : " M"));
      path += fmt_g(X(r.noise_db)) + " " + fmt_g(Y(r.ber));
      open = true;
    }
    if (!path.empty())
      os << "<path d='" << path << "' fill='none' stroke='" << col
         << "' stroke-width='1.8'/>\n";
    for (const BerRecord& r : curve) {
      const double x = X(r.noise_db);
      if (r.ci_high > 0) {
        const double ylo = Y(std::max(r.ci_low, 0.0)), yhi = Y(r.ci_high);
        os << "<line x1='" << x << "' y1='" << ylo << "' x2='" << x << "' y2='" << yhi
           << "' stroke='" << col << "'/>\n";
        os << "<line x1='" << (x - 3) << "' y1='" << yhi << "' x2='" << (x + 3)
           << "' y2='" << yhi << "' stroke='" << col << "'/>\n";
        if (r.ci_low > 0)
          os << "<line x1='" << (x - 3) << "' y1='" << ylo << "' x2='" << (x + 3)
             << "' y2='" << ylo << "' stroke='" << col << "'/>\n";
      }
      if (r.ber > 0)
        os << "<circle cx='" << x << "' cy='" << Y(r.ber) << "' r='3.2' fill='"
           << (r.censored ? "white" : col) << "' stroke='" << col << "'/>\n";
    }
  }

  // Legend.
  double ly = T + 12;
  const double lx = L + plot_w + 14;
  for (const auto& [name, curve] : curves) {
    const std::string col = color_of(name);
    os << "<line x1='" << lx << "' y1='" << ly << "' x2='" << (lx + 26) << "' y2='" << ly
       << "' stroke='" << col << "' stroke-width='1.8'/>\n";
    os << "<circle cx='" << (lx + 13) << "' cy='" << ly << "' r='3.2' fill='" << col
       << "' stroke='" << col << "'/>\n";
    os << "<text x='" << (lx + 34) << "' y='" << (ly + 4) << "'>" << name << "</text>\n";
    ly += 20;
  }

  os << "</g>\n</svg>\n";
}

inline void write_ber_svg_file(const std::string& path,
                               const std::vector<BerRecord>& records,
                               double target_ber = 2e-3) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write svg file " + path);
  write_ber_svg(os, records, target_ber);
}

}  // namespace imdd
