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

#include <stdexcept>

#include "imdd/gray.hpp"
#include "imdd/rng.hpp"
#include "imdd/types.hpp"

namespace imdd {

// Parameters of the simulated IM/DD link.  Defaults describe the reference
// system: 112 GBd PAM4, 1270 nm carrier over 4 km of fiber with
// -5 ps/nm/km dispersion, 3x oversampling, 0.2 roll-off and a DC bias of
// 2.25 in front of the square-law detector.
struct LinkParams {
  double baud_rate = 112e9;      // symbols per second
  double wavelength = 1270e-9;   // carrier wavelength [m]
  double dispersion = -5e-6;     // dispersion coefficient D [s/m^2]
  double fiber_length = 4000.0;  // [m]
  int n_up = 3;                  // upsampling factor at the transmitter
  int n_down = 3;                // downsampling factor at the receiver
  double rolloff = 0.2;          // RRC roll-off
  int rrc_span = 32;             // RRC half-length in symbol periods
  double bias = 2.25;            // DC bias b added to the shaped signal
  int frame_symbols = 10000;     // symbols per simulated frame

  double sample_rate() const { return baud_rate * n_up; }

  void validate() const {
    if (baud_rate <= 0 || wavelength <= 0 || n_up < 1 || n_down < 1 ||
        rolloff <= 0 || rolloff > 1 || rrc_span < 1 || frame_symbols < 1 ||
        fiber_length < 0)
      throw std::invalid_argument("LinkParams: out-of-range field");
    if (n_up != n_down)
      throw std::invalid_argument("LinkParams: n_up must equal n_down");
  }
};

// A frame of PAM4 symbol indices (0..3).
struct SymbolFrame {
  VecXi index;

  Index size() const { return index.size(); }

  // Amplitudes carried by the frame.
  VecXd values() const {
    VecXd v(index.size());
    for (Index i = 0; i < index.size(); ++i) v[i] = symbol_value(index[i]);
    return v;
  }
};

// Receiver output after matched filtering and downsampling, one sample per
// transmitted symbol.
using RxSamples = VecXd;

inline SymbolFrame draw_symbol_frame(Index n, Rng& rng) {
  SymbolFrame f;
  f.index.resize(n);
  for (Index i = 0; i < n; ++i) f.index[i] = rng.uniform_int(4);
  return f;
}

// Sliding-window dataset: row n of `chunks` holds the n_tap received samples
// centred on symbol n, `labels` the transmitted symbol index.  Edge symbols
// without a full window are dropped.
struct LabeledDataset {
  MatXd chunks;        // (frame_symbols - n_tap + 1) x n_tap
  VecXi labels;
  double noise_db = 0;  // noise level the frame was simulated at
  LinkParams link;

  Index size() const { return labels.size(); }
  int n_tap() const { return static_cast<int>(chunks.cols()); }
};

}  // namespace imdd
