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

#include "imdd/types.hpp"

namespace imdd {

template <typename T>
struct LeastSquares {
  Vec<T> coeffs;
  Index rank = 0;
  bool rank_deficient = false;
};

// Minimise ||A x - b|| via a rank-revealing orthogonal factorisation.
// For rank-deficient systems this returns the minimum-norm minimiser and
// flags the deficiency instead of failing.
template <typename T>
LeastSquares<T> fit_least_squares(const Mat<T>& A, const Vec<T>& b) {
  Eigen::CompleteOrthogonalDecomposition<Mat<T>> cod(A);
  LeastSquares<T> out;
  out.coeffs = cod.solve(b);
  out.rank = cod.rank();
  out.rank_deficient = out.rank < A.cols();
  return out;
}

}  // namespace imdd
