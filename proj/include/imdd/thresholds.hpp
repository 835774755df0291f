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
#include <array>
#include <vector>

#include "imdd/types.hpp"

namespace imdd {

// Three decision boundaries for PAM4 with half-open intervals:
// v < t[0] -> 0, t[0] <= v < t[1] -> 1, t[1] <= v < t[2] -> 2, v >= t[2] -> 3.
struct ThresholdDemapper {
  std::array<double, 3> t{-2.0, 0.0, 2.0};

  int decide(double v) const {
    return (v >= t[0]) + (v >= t[1]) + (v >= t[2]);
  }

  VecXi decide(const VecXd& v) const {
    VecXi out(v.size());
    for (Index i = 0; i < v.size(); ++i) out[i] = decide(v[i]);
    return out;
  }
};

// Fit the boundary between neighbouring classes k and k+1.  Values >= the
// boundary fall to the upper class, so the error count
// errors(c) = #{lower-class v >= c} + #{upper-class v < c} is piecewise
// constant between distinct sample values.  The scan walks those regions
// and returns the midpoint of the first optimal one; when several adjacent
// regions tie, the midpoint of the whole tied interval is returned (e.g.
// clean classes {-3} vs {-1} give -2, not a sample-adjacent value).
inline double fit_boundary(std::vector<double> lo, std::vector<double> hi) {
  std::vector<std::pair<double, int>> pts;  // (value, +1 if lower class)
  pts.reserve(lo.size() + hi.size());
  for (double v : lo) pts.emplace_back(v, 1);
  for (double v : hi) pts.emplace_back(v, 0);
  std::sort(pts.begin(), pts.end());

  struct Region {
    double left, right;  // optimal boundaries form (left, right]
    long err;
  };
  std::vector<Region> regions;
  long err = static_cast<long>(lo.size());  // c below every sample
  // Unbounded edge regions get a synthetic width of 2 so a tie that ends at
  // the data edge resolves one unit beyond the extreme sample.
  regions.push_back({pts.front().first - 2.0, pts.front().first, err});
  size_t i = 0;
  while (i < pts.size()) {
    const double v = pts[i].first;
    while (i < pts.size() && pts[i].first == v) {
      err += pts[i].second ? -1 : +1;
      ++i;
    }
    const double right = i < pts.size() ? pts[i].first : v + 2.0;
    regions.push_back({v, right, err});
  }

  long best = regions.front().err;
  for (const Region& r : regions) best = std::min(best, r.err);
  size_t first = 0;
  while (regions[first].err != best) ++first;
  size_t last = first;
  while (last + 1 < regions.size() && regions[last + 1].err == best) ++last;
  return 0.5 * (regions[first].left + regions[last].right);
}

// BER-minimising thresholds from equalised values and true symbol indices.
// Each boundary only weighs the two classes it separates.
inline ThresholdDemapper fit_thresholds(const VecXd& values, const VecXi& labels) {
  std::array<std::vector<double>, 4> by_class;
  for (Index i = 0; i < values.size(); ++i)
    by_class[labels[i]].push_back(values[i]);
  ThresholdDemapper d;
  for (int k = 0; k < 3; ++k)
    d.t[k] = fit_boundary(by_class[k], by_class[k + 1]);
  return d;
}

}  // namespace imdd
