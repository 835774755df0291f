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
#include <vector>

#include "imdd/tape.hpp"
#include "imdd/types.hpp"

namespace imdd {

template <typename T>
struct AdamConfig {
  T lr = T(1e-3);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

// Adam with bias correction, one state per parameter group.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Param<T>*> params, AdamConfig<T> cfg = {})
      : params_(std::move(params)), cfg_(cfg) {
    for (Param<T>* p : params_) {
      m_.push_back(Mat<T>::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Mat<T>::Zero(p->value.rows(), p->value.cols()));
    }
  }

  // Consume the gradients currently stored in the parameters and update
  // their values in place.
  void step() {
    ++t_;
    const T c1 = T(1) - std::pow(cfg_.beta1, static_cast<T>(t_));
    const T c2 = T(1) - std::pow(cfg_.beta2, static_cast<T>(t_));
    for (size_t k = 0; k < params_.size(); ++k) {
      Param<T>& p = *params_[k];
      m_[k] = cfg_.beta1 * m_[k] + (T(1) - cfg_.beta1) * p.grad;
      v_[k] = cfg_.beta2 * v_[k] + (T(1) - cfg_.beta2) * p.grad.cwiseProduct(p.grad);
      p.value.array() -=
          cfg_.lr * (m_[k].array() / c1) /
          ((v_[k].array() / c2).sqrt() + cfg_.eps);
    }
  }

  long steps_taken() const { return t_; }

 private:
  std::vector<Param<T>*> params_;
  AdamConfig<T> cfg_;
  std::vector<Mat<T>> m_, v_;
  long t_ = 0;
};

}  // namespace imdd
