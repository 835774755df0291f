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

#include <stdexcept>
#include <string>

#include "imdd/features.hpp"
#include "imdd/lstsq.hpp"
#include "imdd/thresholds.hpp"
#include "imdd/types.hpp"

namespace imdd {

// Feed-forward equalizer + slicer.  Covers the linear equalizer (order 1)
// and the Volterra nonlinear equalizer (order > 1); both regress the window
// onto the transmitted amplitude and slice with BER-minimising thresholds.
struct ClassicalDemapper {
  int n_tap = 7;
  int order = 1;        // polynomial order of the feature expansion
  VecXd coeffs;         // one weight per feature column
  ThresholdDemapper slicer;
  bool rank_deficient = false;

  MatXd features(const MatXd& chunks) const {
    if (chunks.cols() != n_tap)
      throw std::invalid_argument("ClassicalDemapper: window width mismatch");
    return order == 1 ? le_features(chunks) : volterra_features(chunks, order);
  }

  // Equalised soft values, one per window.
  VecXd equalize(const MatXd& chunks) const { return features(chunks) * coeffs; }

  // Hard symbol decisions.
  VecXi demap(const MatXd& chunks) const { return slicer.decide(equalize(chunks)); }
};

// Least-squares fit of the equalizer onto the transmitted amplitudes,
// followed by the threshold fit on the equalised training output.
inline ClassicalDemapper fit_classical(const MatXd& chunks, const VecXi& labels,
                                       int order) {
  ClassicalDemapper d;
  d.n_tap = static_cast<int>(chunks.cols());
  d.order = order;
  VecXd target(labels.size());
  for (Index i = 0; i < labels.size(); ++i) target[i] = symbol_value(labels[i]);
  const MatXd A = d.features(chunks);
  const LeastSquares<double> fit = fit_least_squares<double>(A, target);
  d.coeffs = fit.coeffs;
  d.rank_deficient = fit.rank_deficient;
  d.slicer = fit_thresholds(A * d.coeffs, labels);
  return d;
}

}  // namespace imdd
