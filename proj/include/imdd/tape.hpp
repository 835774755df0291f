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

#include <cassert>
#include <cmath>
#include <utility>
#include <vector>

#include "imdd/rng.hpp"
#include "imdd/types.hpp"

namespace imdd {

// Trainable tensor: value plus the gradient slot the tape writes into.
template <typename T>
struct Param {
  Mat<T> value;
  Mat<T> grad;

  void resize(Index r, Index c) {
    value.setZero(r, c);
    grad.setZero(r, c);
  }

  // Uniform fan-in initialisation: +-gain/sqrt(fan_in), the fan-in being the
  // column count of a weight matrix applied as value * x.
  void init_uniform(Index r, Index c, Rng& rng, T gain = T(1)) {
    resize(r, c);
    const T a = gain / std::sqrt(static_cast<T>(c));
    for (Index i = 0; i < value.size(); ++i)
      value.data()[i] = static_cast<T>(rng.uniform(-a, a));
  }
};

// One spike event: (batch column, input row).  Batches of event lists are
// how the sparse input layers talk to the tape.
using SpikeEvents = std::vector<std::pair<int, int>>;

// Define-by-run reverse-mode engine over dense matrices.  Columns are batch
// elements.  Values are computed eagerly as nodes are recorded; backward()
// replays the record in reverse.  The op set is exactly what the demappers
// need: affine layers, tanh, the spiking-neuron step (Heaviside forward,
// fast-sigmoid surrogate backward), a max-over-time readout and softmax
// cross-entropy.
template <typename T>
class Tape {
 public:
  enum class Op {
    kConst,
    kParam,
    kMatmul,      // A * B
    kAxpby,       // ca*A + cb*B
    kAddColBias,  // A + bias per column
    kTanh,
    kSpike,       // z = 1[v >= theta], d z/d v = (beta*|v-theta|+1)^-2
    kReset,       // v - (v - v_reset) .* z
    kInject,      // W columns scattered into batch columns by spike events
    kMaxOverTime,
    kSoftmaxCE,
  };

  int constant(Mat<T> v) {
    Node n;
    n.op = Op::kConst;
    n.value = std::move(v);
    return push(std::move(n));
  }

  int param(Param<T>& p) {
    Node n;
    n.op = Op::kParam;
    n.value = p.value;
    n.bound = &p;
    return push(std::move(n));
  }

  int matmul(int a, int b) {
    Node n;
    n.op = Op::kMatmul;
    n.a = a;
    n.b = b;
    n.value.noalias() = nodes_[a].value * nodes_[b].value;
    return push(std::move(n));
  }

  int axpby(T ca, int a, T cb, int b) {
    Node n;
    n.op = Op::kAxpby;
    n.a = a;
    n.b = b;
    n.ca = ca;
    n.cb = cb;
    n.value = ca * nodes_[a].value + cb * nodes_[b].value;
    return push(std::move(n));
  }

  int add_col_bias(int a, int bias) {
    assert(nodes_[bias].value.cols() == 1);
    Node n;
    n.op = Op::kAddColBias;
    n.a = a;
    n.b = bias;
    n.value = nodes_[a].value.colwise() + nodes_[bias].value.col(0);
    return push(std::move(n));
  }

  int tanh_(int a) {
    Node n;
    n.op = Op::kTanh;
    n.a = a;
    n.value = nodes_[a].value.array().tanh();
    return push(std::move(n));
  }

  int spike(int v, T theta, T sg_beta) {
    Node n;
    n.op = Op::kSpike;
    n.a = v;
    n.ca = theta;
    n.cb = sg_beta;
    n.value = (nodes_[v].value.array() >= theta).template cast<T>();
    return push(std::move(n));
  }

  int reset(int v, int z, T v_reset) {
    Node n;
    n.op = Op::kReset;
    n.a = v;
    n.b = z;
    n.ca = v_reset;
    n.value = nodes_[v].value -
              (nodes_[v].value.array() - v_reset).matrix().cwiseProduct(nodes_[z].value);
    return push(std::move(n));
  }

  // Current injected by input spikes: out.col(b) += W.col(i) per event.
  // The event list must outlive the tape.
  int inject(int w, const SpikeEvents& events, Index batch) {
    Node n;
    n.op = Op::kInject;
    n.a = w;
    n.events = &events;
    n.value.setZero(nodes_[w].value.rows(), batch);
    for (const auto& [b, i] : events) n.value.col(b) += nodes_[w].value.col(i);
    return push(std::move(n));
  }

  // Elementwise max across equally shaped step nodes; ties resolve to the
  // earliest step, which is also where the gradient goes.
  int max_over_time(std::vector<int> steps) {
    assert(!steps.empty());
    Node n;
    n.op = Op::kMaxOverTime;
    n.args = std::move(steps);
    const Mat<T>& first = nodes_[n.args.front()].value;
    n.value = first;
    n.argmax.setZero(first.rows(), first.cols());
    for (size_t s = 1; s < n.args.size(); ++s) {
      const Mat<T>& v = nodes_[n.args[s]].value;
      for (Index j = 0; j < v.cols(); ++j)
        for (Index i = 0; i < v.rows(); ++i)
          if (v(i, j) > n.value(i, j)) {
            n.value(i, j) = v(i, j);
            n.argmax(i, j) = static_cast<int>(s);
          }
    }
    return push(std::move(n));
  }

  // Mean softmax cross-entropy over the batch.  `targets` holds one class
  // index per column of `logits`; the node value is 1x1.
  int softmax_cross_entropy(int logits, VecXi targets) {
    Node n;
    n.op = Op::kSoftmaxCE;
    n.a = logits;
    n.targets = std::move(targets);
    const Mat<T>& x = nodes_[logits].value;
    const Index B = x.cols();
    assert(n.targets.size() == B);
    n.softmax.resize(x.rows(), B);
    T loss = 0;
    for (Index j = 0; j < B; ++j) {
      const T m = x.col(j).maxCoeff();
      Vec<T> e = (x.col(j).array() - m).exp();
      const T s = e.sum();
      n.softmax.col(j) = e / s;
      loss += std::log(s) + m - x(n.targets[j], j);
    }
    n.value.resize(1, 1);
    n.value(0, 0) = loss / static_cast<T>(B);
    return push(std::move(n));
  }

  const Mat<T>& value(int id) const { return nodes_[id].value; }
  const Mat<T>& grad(int id) const { return nodes_[id].grad; }
  Index size() const { return static_cast<Index>(nodes_.size()); }

  void clear() { nodes_.clear(); }

  // Reverse sweep from `root` (normally the loss).  Gradient slots of every
  // node and of every bound parameter are overwritten, so running backward
  // twice yields identical results.
  void backward(int root) {
    for (Node& n : nodes_) n.grad.setZero(n.value.rows(), n.value.cols());
    nodes_[root].grad.setOnes(nodes_[root].value.rows(), nodes_[root].value.cols());
    for (int id = root; id >= 0; --id) {
      Node& n = nodes_[id];
      if (n.grad.size() == 0) continue;
      const Mat<T>& g = n.grad;
      switch (n.op) {
        case Op::kConst:
        case Op::kParam:
          break;
        case Op::kMatmul:
          nodes_[n.a].grad.noalias() += g * nodes_[n.b].value.transpose();
          nodes_[n.b].grad.noalias() += nodes_[n.a].value.transpose() * g;
          break;
        case Op::kAxpby:
          nodes_[n.a].grad += n.ca * g;
          nodes_[n.b].grad += n.cb * g;
          break;
        case Op::kAddColBias:
          nodes_[n.a].grad += g;
          nodes_[n.b].grad.col(0) += g.rowwise().sum();
          break;
        case Op::kTanh:
          nodes_[n.a].grad.array() += g.array() * (T(1) - n.value.array().square());
          break;
        case Op::kSpike: {
          // SuperSpike surrogate in place of the Heaviside derivative.
          auto dist = (nodes_[n.a].value.array() - n.ca).abs();
          nodes_[n.a].grad.array() += g.array() / (n.cb * dist + T(1)).square();
          break;
        }
        case Op::kReset:
          nodes_[n.a].grad.array() += g.array() * (T(1) - nodes_[n.b].value.array());
          nodes_[n.b].grad.array() +=
              g.array() * (n.ca - nodes_[n.a].value.array());
          break;
        case Op::kInject:
          for (const auto& [b, i] : *n.events)
            nodes_[n.a].grad.col(i) += g.col(b);
          break;
        case Op::kMaxOverTime:
          for (Index j = 0; j < g.cols(); ++j)
            for (Index i = 0; i < g.rows(); ++i)
              nodes_[n.args[n.argmax(i, j)]].grad(i, j) += g(i, j);
          break;
        case Op::kSoftmaxCE: {
          Mat<T> d = n.softmax;
          for (Index j = 0; j < d.cols(); ++j) d(n.targets[j], j) -= T(1);
          nodes_[n.a].grad += g(0, 0) / static_cast<T>(d.cols()) * d;
          break;
        }
      }
    }
    // Hand the accumulated gradients to the bound parameters.
    for (Node& n : nodes_)
      if (n.bound) n.bound->grad.setZero(n.value.rows(), n.value.cols());
    for (Node& n : nodes_)
      if (n.bound) n.bound->grad += n.grad;
  }

 private:
  struct Node {
    Op op;
    int a = -1, b = -1;
    T ca = T(0), cb = T(0);
    Mat<T> value;
    Mat<T> grad;
    Param<T>* bound = nullptr;
    const SpikeEvents* events = nullptr;
    std::vector<int> args;
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> argmax;
    Mat<T> softmax;
    VecXi targets;
  };

  int push(Node&& n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  std::vector<Node> nodes_;
};

}  // namespace imdd
