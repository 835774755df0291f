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

#include <cmath>

#include "imdd/types.hpp"

namespace imdd {

// Root-raised-cosine taps sampled at n_up samples per symbol, spanning
// `span` symbol periods on each side of the peak (2*span*n_up + 1 taps).
// Normalised to sum(h^2) = 1/n_up so that the TX/RX cascade has unit gain
// at the symbol instants and the matched filter preserves the per-symbol
// noise budget.
template <typename T>
Vec<T> rrc_taps(int n_up, T rolloff, int span) {
  const T pi = static_cast<T>(M_PI);
  const Index n = 2 * static_cast<Index>(span) * n_up + 1;
  Vec<T> h(n);
  for (Index i = 0; i < n; ++i) {
    // Tap time in symbol periods.
    const T t = static_cast<T>(i - span * n_up) / static_cast<T>(n_up);
    const T t4b = T(4) * rolloff * t;
    if (std::abs(t) < T(1e-10)) {
      h[i] = T(1) + rolloff * (T(4) / pi - T(1));
    } else if (std::abs(std::abs(t4b) - T(1)) < T(1e-8)) {
      // Removable singularity at |t| = 1/(4*rolloff).
      const T a = pi / (T(4) * rolloff);
      h[i] = rolloff / std::sqrt(T(2)) *
             ((T(1) + T(2) / pi) * std::sin(a) + (T(1) - T(2) / pi) * std::cos(a));
    } else {
      const T num = std::sin(pi * t * (T(1) - rolloff)) +
                    t4b * std::cos(pi * t * (T(1) + rolloff));
      h[i] = num / (pi * t * (T(1) - t4b * t4b));
    }
  }
  h *= T(1) / std::sqrt(h.squaredNorm() * static_cast<T>(n_up));
  return h;
}

}  // namespace imdd
