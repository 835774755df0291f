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

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "imdd/channel.hpp"
#include "imdd/gray.hpp"
#include "imdd/link.hpp"
#include "imdd/rng.hpp"
#include "imdd/types.hpp"

namespace imdd {

namespace detail {

// Continued fraction for the regularised incomplete beta (modified Lentz).
inline double betacf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 2000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 3e-16) break;
  }
  return h;
}

}  // namespace detail

// Regularised incomplete beta function I_x(a, b).
inline double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = a * std::log(x) + b * std::log1p(-x) -
                          (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::betacf(a, b, x) / a;
  return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Quantile of the beta distribution by bisection (monotone, fully robust).
inline double ibeta_inv(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ibeta(a, b, mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct CredInterval {
  double low = 0.0;
  double high = 1.0;
};

// Equal-tailed Jeffreys credibility interval for a binomial proportion:
// Beta(k + 1/2, n - k + 1/2) posterior.  The boundary cases keep the exact
// endpoints (k = 0 pins the lower bound to 0, k = n the upper to 1).
inline CredInterval jeffreys_interval(long k, long n, double confidence = 0.99) {
  if (n <= 0) throw std::invalid_argument("jeffreys_interval: n must be positive");
  const double a = k + 0.5, b = double(n - k) + 0.5;
  const double tail = 0.5 * (1.0 - confidence);
  CredInterval ci;
  ci.low = k == 0 ? 0.0 : ibeta_inv(a, b, tail);
  ci.high = k == n ? 1.0 : ibeta_inv(a, b, 1.0 - tail);
  return ci;
}

// One point of a BER curve.
struct BerRecord {
  std::string demapper;
  double noise_db = 0.0;
  long errors = 0;
  long bits = 0;
  double ber = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  int seed = -1;
  bool censored = false;  // bit budget ran out before the error target
};

struct EvalSettings {
  long min_errors = 2000;
  long max_bits = 1'000'000'000;
  double confidence = 0.99;
};

// Stream fresh frames through a demapper until `min_errors` bit errors have
// been counted (or the bit budget is exhausted, which flags the record as
// censored).  Frames are derived from (root_seed, level_index, frame), so
// every demapper evaluated at a level sees the same transmissions.
inline BerRecord evaluate_ber_until(const std::function<VecXi(const MatXd&)>& demap,
                                    int n_tap, const LinkParams& link,
                                    double noise_db, Index level_index,
                                    std::uint64_t root_seed, const EvalSettings& s) {
  BerRecord rec;
  rec.noise_db = noise_db;
  long frame_idx = 0;
  while (rec.errors < s.min_errors && rec.bits < s.max_bits) {
    Rng frame_rng(substream(root_seed, "eval-frame", level_index, frame_idx));
    Rng noise_rng(substream(root_seed, "eval-noise", level_index, frame_idx));
    const SymbolFrame frame = draw_symbol_frame(link.frame_symbols, frame_rng);
    const RxSamples rx = simulate_link(frame, link, noise_db, noise_rng);
    const MatXd chunks = extract_chunks(rx, n_tap);
    const VecXi pred = demap(chunks);
    const Index off = n_tap / 2;
    for (Index i = 0; i < pred.size(); ++i)
      rec.errors += bit_errors(pred[i], frame.index[i + off]);
    rec.bits += 2 * pred.size();
    ++frame_idx;
  }
  rec.censored = rec.errors < s.min_errors;
  rec.ber = double(rec.errors) / double(rec.bits);
  const CredInterval ci = jeffreys_interval(rec.errors, rec.bits, s.confidence);
  rec.ci_low = ci.low;
  rec.ci_high = ci.high;
  return rec;
}

// Noise level at which a BER curve crosses `target`, by log-linear
// interpolation between the first pair of grid points that brackets it
// (scanning from quiet to noisy).  Returns NaN when the curve never
// crosses.  Points with zero measured errors cannot be interpolated through
// and are skipped.
inline double crossing_noise_db(const std::vector<BerRecord>& curve, double target) {
  std::vector<const BerRecord*> pts;
  for (const BerRecord& r : curve) pts.push_back(&r);
  std::sort(pts.begin(), pts.end(), [](const BerRecord* a, const BerRecord* b) {
    return a->noise_db < b->noise_db;
  });
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double y0 = pts[i]->ber, y1 = pts[i + 1]->ber;
    if (y0 <= 0.0 || y1 <= 0.0) continue;
    if ((y0 - target) * (y1 - target) > 0.0) continue;
    if (y0 == y1) return pts[i]->noise_db;
    const double t = (std::log(target) - std::log(y0)) / (std::log(y1) - std::log(y0));
    return pts[i]->noise_db + t * (pts[i + 1]->noise_db - pts[i]->noise_db);
  }
  return std::nan("");
}

}  // namespace imdd
