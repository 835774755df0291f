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

#include <array>
#include <cstdint>

namespace imdd {

// PAM4 with Gray labels.  Symbol index k = 0..3 carries amplitude
// kPam4Alphabet[k] and bit pattern kGrayBits[k]; adjacent amplitudes differ
// in exactly one bit, so one symbol error usually costs one bit error.
inline constexpr std::array<double, 4> kPam4Alphabet{-3.0, -1.0, 1.0, 3.0};
inline constexpr std::array<std::array<int, 2>, 4> kGrayBits{
    {{0, 0}, {0, 1}, {1, 1}, {1, 0}}};

constexpr double symbol_value(int index) { return kPam4Alphabet[index]; }

constexpr int bits_to_index(int b1, int b2) {
  // Inverse of kGrayBits: 00 -> 0, 01 -> 1, 11 -> 2, 10 -> 3.
  return b1 ? (b2 ? 2 : 3) : (b2 ? 1 : 0);
}

// Hamming distance between the Gray labels of two symbol indices (0..2).
constexpr int bit_errors(int a, int b) {
  const int x = (kGrayBits[a][0] ^ kGrayBits[b][0]);
  const int y = (kGrayBits[a][1] ^ kGrayBits[b][1]);
  return x + y;
}

}  // namespace imdd
