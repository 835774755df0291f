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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace imdd {

using Index = Eigen::Index;

// Dense column vector / matrix of scalar T.  Everything in the library is
// expressed in terms of these two aliases so the scalar type stays a template
// parameter where it matters (float vs double experiments) without dragging
// Eigen template noise through every signature.
template <typename T>
using Vec = Eigen::Vector<T, Eigen::Dynamic>;
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using CVec = Eigen::Vector<std::complex<T>, Eigen::Dynamic>;

using VecXd = Vec<double>;
using MatXd = Mat<double>;
using VecXi = Vec<int>;

}  // namespace imdd
