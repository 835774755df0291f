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

#include <numeric>
#include <vector>

#include "imdd/adam.hpp"
#include "imdd/tape.hpp"
#include "imdd/types.hpp"

namespace imdd {

// Feed-forward softmax demapper: window in, class scores out.  Default
// topology 7-40-20-4 with tanh hidden units.  Inputs are standardised with
// statistics frozen from the first training frame; without this the first
// tanh layer saturates on the unipolar receiver samples.
template <typename T>
struct AnnModel {
  struct Dense {
    Param<T> W, b;
  };

  int n_tap = 7;
  std::vector<int> hidden{40, 20};
  int classes = 4;
  Vec<T> in_mean, in_scale;
  std::vector<Dense> layers;

  void init(Rng& rng, T gain = T(1)) {
    layers.clear();
    std::vector<int> sizes{n_tap};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(classes);
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
      Dense d;
      d.W.init_uniform(sizes[l + 1], sizes[l], rng, gain);
      d.b.init_uniform(sizes[l + 1], 1, rng, gain);
      layers.push_back(std::move(d));
    }
    in_mean = Vec<T>::Zero(n_tap);
    in_scale = Vec<T>::Ones(n_tap);
  }

  void fit_standardiser(const MatXd& chunks) {
    in_mean.resize(n_tap);
    in_scale.resize(n_tap);
    for (int j = 0; j < n_tap; ++j) {
      const double m = chunks.col(j).mean();
      const double s = std::sqrt((chunks.col(j).array() - m).square().mean());
      in_mean[j] = static_cast<T>(m);
      in_scale[j] = static_cast<T>(s > 0 ? 1.0 / s : 1.0);
    }
  }

  std::vector<Param<T>*> params() {
    std::vector<Param<T>*> out;
    for (Dense& d : layers) {
      out.push_back(&d.W);
      out.push_back(&d.b);
    }
    return out;
  }

  // Standardised input matrix, one column per window.
  Mat<T> inputs(const MatXd& chunks) const {
    Mat<T> x = chunks.transpose().template cast<T>();
    x.colwise() -= in_mean;
    x.array().colwise() *= in_scale.array();
    return x;
  }

  // Plain inference path.
  Mat<T> logits(Mat<T> x) const {
    for (size_t l = 0; l < layers.size(); ++l) {
      x = (layers[l].W.value * x).colwise() + layers[l].b.value.col(0);
      if (l + 1 < layers.size()) x = x.array().tanh();
    }
    return x;
  }

  // Training path: record the same computation on a tape.
  int logits_node(Tape<T>& tape, int x) {
    for (size_t l = 0; l < layers.size(); ++l) {
      x = tape.matmul(tape.param(layers[l].W), x);
      x = tape.add_col_bias(x, tape.param(layers[l].b));
      if (l + 1 < layers.size()) x = tape.tanh_(x);
    }
    return x;
  }

  VecXi demap(const MatXd& chunks) const {
    const Mat<T> y = logits(inputs(chunks));
    VecXi out(y.cols());
    for (Index j = 0; j < y.cols(); ++j) {
      Index r;
      y.col(j).maxCoeff(&r);
      out[j] = static_cast<int>(r);
    }
    return out;
  }
};

// One epoch of minibatch SGD with Adam on softmax cross-entropy.  Returns
// the mean training loss.
template <typename T>
T ann_train_epoch(AnnModel<T>& model, const MatXd& chunks, const VecXi& labels,
                  Adam<T>& opt, int batch, Rng& rng) {
  const Index n = labels.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  for (Index i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.uniform_int(static_cast<int>(i) + 1)]);

  const Mat<T> all = model.inputs(chunks);
  T total = 0;
  Index done = 0;
  Tape<T> tape;
  while (done < n) {
    const Index B = std::min<Index>(batch, n - done);
    Mat<T> x(model.n_tap, B);
    VecXi t(B);
    for (Index j = 0; j < B; ++j) {
      x.col(j) = all.col(order[done + j]);
      t[j] = labels[order[done + j]];
    }
    tape.clear();
    const int loss =
        tape.softmax_cross_entropy(model.logits_node(tape, tape.constant(std::move(x))),
                                   std::move(t));
    tape.backward(loss);
    opt.step();
    total += tape.value(loss)(0, 0) * static_cast<T>(B);
    done += B;
  }
  return total / static_cast<T>(n);
}

}  // namespace imdd
