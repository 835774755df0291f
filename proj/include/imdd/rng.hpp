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
#include <cstdint>
#include <string_view>

namespace imdd {

// splitmix64 finalizer.  Used both as a bit mixer for deriving independent
// seed substreams and as the core of the counter-based generator below.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derive a substream seed from a root seed, a purpose tag and up to two
// indices (e.g. noise level and frame counter).  Different purposes and
// indices yield statistically independent streams, so every frame of every
// stage of a run can be regenerated in isolation.
inline std::uint64_t substream(std::uint64_t root, std::string_view purpose,
                               std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the tag
  for (unsigned char c : purpose) h = (h ^ c) * 0x100000001b3ull;
  std::uint64_t s = mix64(root ^ h);
  s = mix64(s ^ a);
  s = mix64(s ^ b);
  return s;
}

// Minimal deterministic generator (splitmix64 sequence).  The standard
// <random> engines would do, but the distributions on top of them are
// implementation-defined; hand-rolling the two draws we need keeps results
// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return mix64(state_++); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n) for small n via rejection-free scaling.
  int uniform_int(int n) {
    return static_cast<int>((static_cast<__uint128_t>(next()) * n) >> 64);
  }

  // Standard normal via Box-Muller (fully specified, no hidden state).
  double normal() {
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace imdd
