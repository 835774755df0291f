// SPDX-License-Identifier: Apache-2.0
//
// Finite-difference gradient checking shared by the unit tests and the
// acceptance gate.  A "case" is a closure that builds a fresh graph from the
// current parameter values and returns the scalar loss; the same closure
// with `with_grad = true` must also run backward so Param::grad is filled.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "imdd/rng.hpp"
#include "imdd/tape.hpp"

namespace fd {

using imdd::Index;
using imdd::Param;
using imdd::Rng;

using LossFn = std::function<double(bool with_grad)>;

// Max relative error between analytic and central-difference gradients over
// up to `per_param` randomly chosen entries of each parameter.
inline double max_rel_grad_err(const std::vector<Param<double>*>& params,
                               const LossFn& loss, Rng& rng,
                               int per_param = 12, double h = 1e-5) {
  loss(true);  // fill grads
  std::vector<Eigen::MatrixXd> analytic;
  analytic.reserve(params.size());
  for (const Param<double>* p : params) analytic.push_back(p->grad);

  double worst = 0.0;
  for (size_t k = 0; k < params.size(); ++k) {
    Param<double>& p = *params[k];
    const Index n = p.value.size();
    for (int s = 0; s < std::min<Index>(per_param, n); ++s) {
      const Index i = n <= per_param ? s : Index(rng.uniform_int(int(n)));
      const double x0 = p.value.data()[i];
      p.value.data()[i] = x0 + h;
      const double fp = loss(false);
      p.value.data()[i] = x0 - h;
      const double fm = loss(false);
      p.value.data()[i] = x0;
      const double num = (fp - fm) / (2.0 * h);
      const double ana = analytic[k].data()[i];
      const double err =
          std::abs(num - ana) / std::max(1e-6, std::abs(num) + std::abs(ana));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace fd
