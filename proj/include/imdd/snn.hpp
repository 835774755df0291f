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
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "imdd/adam.hpp"
#include "imdd/tape.hpp"
#include "imdd/types.hpp"

namespace imdd {

// Spiking demapper description.  The receiver window is distance-coded:
// each of the n_tap samples meets neurons_per_tap reference points chi_i
// spread over [chi_min, chi_max]; sample x makes input neuron (tap, i) fire
// once at t = enc_alpha * |x - chi_i| + enc_offset, or never if that time
// reaches enc_cutoff.  The hidden layer is leaky integrate-and-fire, the
// readout leaky integrators whose maximal membrane over the window scores
// the four classes.
struct SnnParams {
  int n_tap = 7;
  int neurons_per_tap = 10;
  int hidden = 40;
  int classes = 4;
  double tau_m = 6e-6;       // membrane time constant [s]
  double tau_s = 6e-6;       // synaptic time constant [s]
  double theta = 1.0;        // firing threshold
  double v_reset = 0.0;
  double v_leak = 0.0;
  double r_leak = 1.0;       // leak resistance scaling the input current
  double dt = 0.5e-6;        // integrator step [s]
  double t_max = 30e-6;      // simulation window [s]
  double enc_alpha = 8e-6;   // encoding slope [s per unit distance]
  double enc_offset = 0.0;   // encoding offset [s]
  double enc_cutoff = 15e-6; // spike times at/after this are dropped [s]
  double chi_min = 0.0;
  double chi_max = 7.0;
  double sg_beta = 10.0;     // surrogate-gradient steepness

  int inputs() const { return n_tap * neurons_per_tap; }
  int steps() const { return static_cast<int>(std::lround(t_max / dt)); }
  double decay_s() const { return 1.0 - dt / tau_s; }
  double decay_m() const { return 1.0 - dt / tau_m; }
  double drive_m() const { return dt / tau_m; }

  void validate() const {
    if (n_tap < 1 || neurons_per_tap < 2 || hidden < 1 || classes < 2)
      throw std::invalid_argument("SnnParams: bad layer sizes");
    if (dt <= 0 || t_max < dt || tau_m < dt || tau_s < dt)
      throw std::invalid_argument("SnnParams: bad time constants");
    if (enc_alpha <= 0 || enc_cutoff <= 0 || chi_max <= chi_min)
      throw std::invalid_argument("SnnParams: bad encoding");
  }

  // Reference points of the distance code.
  VecXd chi() const {
    VecXd c(neurons_per_tap);
    for (int i = 0; i < neurons_per_tap; ++i)
      c[i] = chi_min + (chi_max - chi_min) * double(i) / double(neurons_per_tap - 1);
    return c;
  }
};

// Spike list of one encoded window: (time step, input row), row-major over
// (tap, reference point).
using EncodedSample = std::vector<std::pair<int, int>>;

struct EncodedDataset {
  std::vector<EncodedSample> samples;
  VecXi labels;
  int inputs = 0;
  int steps = 0;

  Index size() const { return static_cast<Index>(samples.size()); }
};

inline EncodedSample encode_window(const Eigen::Ref<const Eigen::RowVectorXd>& window,
                                   const VecXd& chi, const SnnParams& p) {
  EncodedSample out;
  const int n_steps = p.steps();
  for (int j = 0; j < p.n_tap; ++j) {
    for (int i = 0; i < p.neurons_per_tap; ++i) {
      const double t = p.enc_alpha * std::abs(window[j] - chi[i]) + p.enc_offset;
      if (t >= p.enc_cutoff) continue;
      const int step = static_cast<int>(std::floor(t / p.dt));
      if (step >= n_steps) continue;
      out.emplace_back(step, j * p.neurons_per_tap + i);
    }
  }
  return out;
}

inline EncodedDataset encode_spikes(const MatXd& chunks, const VecXi& labels,
                                    const SnnParams& p) {
  p.validate();
  if (chunks.cols() != p.n_tap)
    throw std::invalid_argument("encode_spikes: window width mismatch");
  EncodedDataset d;
  d.inputs = p.inputs();
  d.steps = p.steps();
  d.labels = labels;
  d.samples.reserve(chunks.rows());
  const VecXd chi = p.chi();
  for (Index r = 0; r < chunks.rows(); ++r)
    d.samples.push_back(encode_window(chunks.row(r), chi, p));
  return d;
}

// Events of a minibatch regrouped per time step for the sparse input layer.
struct SpikeBatch {
  std::vector<SpikeEvents> by_step;
  Index batch = 0;
};

inline SpikeBatch gather_batch(const EncodedDataset& d,
                               const std::vector<Index>& ids) {
  SpikeBatch b;
  b.batch = static_cast<Index>(ids.size());
  b.by_step.resize(d.steps);
  for (size_t col = 0; col < ids.size(); ++col)
    for (const auto& [step, row] : d.samples[ids[col]])
      b.by_step[step].emplace_back(static_cast<int>(col), row);
  return b;
}

template <typename T>
struct SnnModel {
  SnnParams p;
  Param<T> w_ih;  // hidden x inputs
  Param<T> w_ho;  // classes x hidden

  void init(Rng& rng, T gain = T(1)) {
    p.validate();
    w_ih.init_uniform(p.hidden, p.inputs(), rng, gain);
    w_ho.init_uniform(p.classes, p.hidden, rng, gain);
  }

  std::vector<Param<T>*> params() { return {&w_ih, &w_ho}; }
};

// Optional record of the internal dynamics (tests and diagnostics).
template <typename T>
struct SnnTraces {
  std::vector<Mat<T>> v_hidden;  // membrane after reset, per step
  std::vector<Mat<T>> z_hidden;  // spikes per step
  std::vector<Mat<T>> v_out;     // readout membrane per step
};

// Plain inference: forward Euler, one batch column per window.  Per step:
// synaptic current decays and collects spikes, membranes integrate, the
// hidden layer thresholds and resets, the readout only integrates.  Returns
// the max-over-time readout membrane (the class scores).
template <typename T>
Mat<T> snn_logits(const SnnModel<T>& m, const SpikeBatch& batch,
                  SnnTraces<T>* traces = nullptr) {
  const SnnParams& p = m.p;
  const Index B = batch.batch;
  const T ls = static_cast<T>(p.decay_s()), lm = static_cast<T>(p.decay_m());
  const T ci = static_cast<T>(p.drive_m() * p.r_leak);
  const T c0 = static_cast<T>(p.drive_m() * p.v_leak);
  const T th = static_cast<T>(p.theta), vr = static_cast<T>(p.v_reset);

  Mat<T> I_h = Mat<T>::Zero(p.hidden, B), v_h = I_h;
  Mat<T> I_o = Mat<T>::Zero(p.classes, B), v_o = I_o;
  Mat<T> best;
  for (int t = 0; t < p.steps(); ++t) {
    I_h *= ls;
    for (const auto& [col, row] : batch.by_step[t])
      I_h.col(col) += m.w_ih.value.col(row);
    v_h = lm * v_h + ci * I_h;
    if (c0 != T(0)) v_h.array() += c0;
    Mat<T> z = (v_h.array() >= th).template cast<T>();
    v_h -= (v_h.array() - vr).matrix().cwiseProduct(z);
    I_o = ls * I_o + m.w_ho.value * z;
    v_o = lm * v_o + ci * I_o;
    if (c0 != T(0)) v_o.array() += c0;
    best = (t == 0) ? v_o : best.cwiseMax(v_o);
    if (traces) {
      traces->v_hidden.push_back(v_h);
      traces->z_hidden.push_back(std::move(z));
      traces->v_out.push_back(v_o);
    }
  }
  return best;
}

// The same dynamics recorded on a tape; returns the loss node.
template <typename T>
int snn_loss_node(SnnModel<T>& m, Tape<T>& tape, const SpikeBatch& batch,
                  VecXi targets) {
  const SnnParams& p = m.p;
  const Index B = batch.batch;
  const T ls = static_cast<T>(p.decay_s()), lm = static_cast<T>(p.decay_m());
  const T ci = static_cast<T>(p.drive_m() * p.r_leak);
  const T th = static_cast<T>(p.theta), vr = static_cast<T>(p.v_reset);
  if (p.v_leak != 0.0)
    throw std::invalid_argument("snn_loss_node: nonzero leak potential not supported");

  const int w_ih = tape.param(m.w_ih);
  const int w_ho = tape.param(m.w_ho);
  int I_h = tape.constant(Mat<T>::Zero(p.hidden, B));
  int v_h = tape.constant(Mat<T>::Zero(p.hidden, B));
  int I_o = tape.constant(Mat<T>::Zero(p.classes, B));
  int v_o = tape.constant(Mat<T>::Zero(p.classes, B));
  std::vector<int> readout;
  readout.reserve(p.steps());
  for (int t = 0; t < p.steps(); ++t) {
    I_h = tape.axpby(ls, I_h, T(1), tape.inject(w_ih, batch.by_step[t], B));
    v_h = tape.axpby(lm, v_h, ci, I_h);
    const int z = tape.spike(v_h, th, static_cast<T>(p.sg_beta));
    v_h = tape.reset(v_h, z, vr);
    I_o = tape.axpby(ls, I_o, T(1), tape.matmul(w_ho, z));
    v_o = tape.axpby(lm, v_o, ci, I_o);
    readout.push_back(v_o);
  }
  return tape.softmax_cross_entropy(tape.max_over_time(std::move(readout)),
                                    std::move(targets));
}

// Hard decisions for a whole encoded dataset.
template <typename T>
VecXi snn_demap(const SnnModel<T>& m, const EncodedDataset& d,
                Index eval_batch = 512) {
  VecXi out(d.size());
  std::vector<Index> ids;
  for (Index start = 0; start < d.size(); start += eval_batch) {
    const Index B = std::min(eval_batch, d.size() - start);
    ids.resize(B);
    std::iota(ids.begin(), ids.end(), start);
    const Mat<T> scores = snn_logits(m, gather_batch(d, ids));
    for (Index j = 0; j < B; ++j) {
      Index r;
      scores.col(j).maxCoeff(&r);
      out[start + j] = static_cast<int>(r);
    }
  }
  return out;
}

// Fraction of windows whose hidden layer never fires (a dead network
// decodes nothing; training has to pull the network out of this regime).
template <typename T>
double hidden_silent_fraction(const SnnModel<T>& m, const EncodedDataset& d,
                              Index eval_batch = 512) {
  Index silent = 0;
  std::vector<Index> ids;
  for (Index start = 0; start < d.size(); start += eval_batch) {
    const Index B = std::min(eval_batch, d.size() - start);
    ids.resize(B);
    std::iota(ids.begin(), ids.end(), start);
    SnnTraces<T> tr;
    snn_logits(m, gather_batch(d, ids), &tr);
    Vec<T> spikes = Vec<T>::Zero(B);
    for (const Mat<T>& z : tr.z_hidden) spikes += z.colwise().sum().transpose();
    for (Index j = 0; j < B; ++j) silent += spikes[j] == T(0);
  }
  return double(silent) / double(d.size());
}

// One epoch of minibatch surrogate-gradient training across the full
// window (backpropagation through time over all integrator steps).
template <typename T>
T snn_train_epoch(SnnModel<T>& m, const EncodedDataset& d, Adam<T>& opt,
                  int batch, Rng& rng) {
  const Index n = d.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  for (Index i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.uniform_int(static_cast<int>(i) + 1)]);

  T total = 0;
  Tape<T> tape;
  std::vector<Index> ids;
  for (Index done = 0; done < n; done += batch) {
    const Index B = std::min<Index>(batch, n - done);
    ids.assign(order.begin() + done, order.begin() + done + B);
    const SpikeBatch sb = gather_batch(d, ids);
    VecXi targets(B);
    for (Index j = 0; j < B; ++j) targets[j] = d.labels[ids[j]];
    tape.clear();
    const int loss = snn_loss_node(m, tape, sb, std::move(targets));
    tape.backward(loss);
    opt.step();
    total += tape.value(loss)(0, 0) * static_cast<T>(B);
    // The tape borrows the batch's event lists; drop it before the batch.
    tape.clear();
  }
  return total / static_cast<T>(n);
}

}  // namespace imdd
