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

#include <unsupported/Eigen/FFT>

#include <cassert>
#include <cmath>
#include <complex>
#include <limits>

#include "imdd/link.hpp"
#include "imdd/rng.hpp"
#include "imdd/rrc.hpp"
#include "imdd/types.hpp"

namespace imdd {

inline constexpr double kSpeedOfLight = 299792458.0;  // [m/s]

namespace detail {
inline Eigen::FFT<double>& fft_engine() {
  static thread_local Eigen::FFT<double> fft;
  return fft;
}
}  // namespace detail

// Zero-stuffing upsampler: symbol k lands on sample k * n_up.
inline VecXd upsample_zero_stuff(const VecXd& y, int n_up) {
  VecXd out = VecXd::Zero(y.size() * n_up);
  for (Index i = 0; i < y.size(); ++i) out[i * n_up] = y[i];
  return out;
}

// Circular convolution with a zero-phase FIR: taps are indexed
// -half..half around their centre, so filtering introduces no group delay
// and symbol alignment survives the whole chain.
inline VecXd cyclic_filter(const VecXd& x, const VecXd& taps) {
  const Index L = x.size();
  assert(taps.size() <= L && taps.size() % 2 == 1);
  const Index half = taps.size() / 2;
  VecXd kernel = VecXd::Zero(L);
  for (Index i = 0; i < taps.size(); ++i)
    kernel[(i - half + L) % L] = taps[i];
  auto& fft = detail::fft_engine();
  CVec<double> X(L), K(L);
  fft.fwd(X.data(), x.data(), L);
  fft.fwd(K.data(), kernel.data(), L);
  X.array() *= K.array();
  CVec<double> out(L);
  fft.inv(out.data(), X.data(), L);
  return out.real();
}

// TX side: zero-stuff, RRC-shape and add the DC bias that turns the PAM4
// waveform into a unipolar intensity drive.
inline VecXd shape_and_bias(const VecXd& symbols, const LinkParams& p) {
  const VecXd h = rrc_taps<double>(p.n_up, p.rolloff, p.rrc_span);
  VecXd s = cyclic_filter(upsample_zero_stuff(symbols, p.n_up), h);
  s.array() += p.bias;
  return s;
}

// Chromatic dispersion of the fiber as a frequency-domain allpass
// H(f) = exp(i * pi * D * l * lambda^2 * f^2 / c) applied to the optical
// field.  The real drive enters, a complex field leaves.
inline CVec<double> chromatic_dispersion(const VecXd& field, const LinkParams& p) {
  const Index L = field.size();
  CVec<double> F(L);
  auto& fft = detail::fft_engine();
  fft.fwd(F.data(), field.data(), L);
  const double fs = p.sample_rate();
  const double coef =
      M_PI * p.dispersion * p.fiber_length * p.wavelength * p.wavelength / kSpeedOfLight;
  for (Index k = 0; k < L; ++k) {
    const double f = (k <= L / 2 ? double(k) : double(k) - double(L)) * fs / double(L);
    F[k] *= std::exp(std::complex<double>(0.0, coef * f * f));
  }
  CVec<double> out(L);
  fft.inv(out.data(), F.data(), L);
  return out;
}

// Square-law photodiode: intensity detection discards the optical phase.
inline VecXd photodiode(const CVec<double>& field) {
  return field.cwiseAbs2();
}

// Additive white Gaussian noise at the photodiode output.  `noise_db` is
// 10*log10(sigma^2) per oversampled sample; -inf disables the noise.
inline void add_awgn(VecXd& x, double noise_db, Rng& rng) {
  if (noise_db == -std::numeric_limits<double>::infinity()) return;
  const double sigma = std::pow(10.0, noise_db / 20.0);
  for (Index i = 0; i < x.size(); ++i) x[i] += sigma * rng.normal();
}

// RX side: matched RRC filter followed by decimation back to symbol rate.
inline RxSamples matched_filter_downsample(const VecXd& r, const LinkParams& p) {
  const VecXd h = rrc_taps<double>(p.n_up, p.rolloff, p.rrc_span);
  const VecXd filtered = cyclic_filter(r, h);
  RxSamples out(filtered.size() / p.n_down);
  for (Index i = 0; i < out.size(); ++i) out[i] = filtered[i * p.n_down];
  return out;
}

// Full link: shaping -> fiber -> photodiode -> noise -> matched filter.
// Returns one received sample per transmitted symbol, aligned with the
// frame (the chain is circular and every filter is zero-phase).
inline RxSamples simulate_link(const SymbolFrame& frame, const LinkParams& p,
                               double noise_db, Rng& rng) {
  p.validate();
  const VecXd drive = shape_and_bias(frame.values(), p);
  VecXd detected;
  if (p.fiber_length != 0.0) {
    detected = photodiode(chromatic_dispersion(drive, p));
  } else {
    detected = drive.cwiseAbs2();
  }
  add_awgn(detected, noise_db, rng);
  return matched_filter_downsample(detected, p);
}

// Sliding windows of n_tap consecutive received samples.  Row i is centred
// on symbol i + n_tap/2; the n_tap/2 edge symbols at each end have no full
// window and are dropped.
inline MatXd extract_chunks(const RxSamples& rx, int n_tap) {
  assert(n_tap >= 1 && n_tap % 2 == 1 && rx.size() >= n_tap);
  const Index rows = rx.size() - n_tap + 1;
  MatXd chunks(rows, n_tap);
  for (Index i = 0; i < rows; ++i)
    chunks.row(i) = rx.segment(i, n_tap).transpose();
  return chunks;
}

// Simulate one frame and package it as windows + labels.
inline LabeledDataset make_dataset(const SymbolFrame& frame, const LinkParams& p,
                                   double noise_db, int n_tap, Rng& rng) {
  LabeledDataset d;
  d.link = p;
  d.noise_db = noise_db;
  const RxSamples rx = simulate_link(frame, p, noise_db, rng);
  d.chunks = extract_chunks(rx, n_tap);
  d.labels = frame.index.segment(n_tap / 2, d.chunks.rows());
  return d;
}

}  // namespace imdd
