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

#include <vector>

#include "imdd/types.hpp"

namespace imdd {

// Linear-equalizer features: a constant column followed by the raw window,
// one row per symbol.
template <typename T>
Mat<T> le_features(const Mat<T>& chunks) {
  Mat<T> f(chunks.rows(), chunks.cols() + 1);
  f.col(0).setOnes();
  f.rightCols(chunks.cols()) = chunks;
  return f;
}

// All multisets of {0..n_tap-1} of size m, i.e. non-decreasing index tuples,
// in lexicographic order.  These name the degree-m monomials of a Volterra
// expansion over the window.
inline std::vector<std::vector<int>> monomial_indices(int n_tap, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(m, 0);
  while (true) {
    out.push_back(c);
    int i = m - 1;
    while (i >= 0 && c[i] == n_tap - 1) --i;
    if (i < 0) break;
    const int v = c[i] + 1;
    for (int j = i; j < m; ++j) c[j] = v;
  }
  return out;
}

// Number of degree-m monomials: C(n_tap + m - 1, m).
inline Index monomial_count(int n_tap, int m) {
  Index num = 1, den = 1;
  for (int i = 0; i < m; ++i) {
    num *= n_tap + i;
    den *= i + 1;
  }
  return num / den;
}

// Volterra features: constant column, then every monomial of degree
// 1..order over the window, degree-major and lexicographic within a degree.
// For order 5 over a 7-sample window this is 1+7+28+84+210+462 = 792
// coefficients.
template <typename T>
Mat<T> volterra_features(const Mat<T>& chunks, int order = 5) {
  const int n_tap = static_cast<int>(chunks.cols());
  Index width = 1;
  for (int m = 1; m <= order; ++m) width += monomial_count(n_tap, m);
  Mat<T> f(chunks.rows(), width);
  f.col(0).setOnes();
  Index col = 1;
  for (int m = 1; m <= order; ++m) {
    for (const auto& combo : monomial_indices(n_tap, m)) {
      auto dst = f.col(col++);
      dst = chunks.col(combo[0]);
      for (size_t j = 1; j < combo.size(); ++j)
        dst.array() *= chunks.col(combo[j]).array();
    }
  }
  return f;
}

inline Index volterra_width(int n_tap, int order) {
  Index width = 1;
  for (int m = 1; m <= order; ++m) width += monomial_count(n_tap, m);
  return width;
}

}  // namespace imdd
