// Copyright 2026 The storystyle Authors.
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

#ifndef STORYSTYLE_MEL_H_
#define STORYSTYLE_MEL_H_

#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "storystyle/rng.h"
#include "storystyle/wav.h"

namespace storystyle {

// Magnitudes below this are floored before the log, so silence maps to
// kLogMelFloor exactly.
inline constexpr double kMelMagnitudeFloor = 1e-5;
inline const double kLogMelFloor = std::log(kMelMagnitudeFloor);

struct MelConfig {
  int sample_rate_hz = 22050;
  int n_fft = 1024;
  int win_length = 1024;
  int hop_length = 256;
  int n_mels = 80;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;

  double hop_s() const {
    return static_cast<double>(hop_length) / sample_rate_hz;
  }
  // Throws ValidationError on inconsistent sizes.
  void validate() const;
};

// Log-magnitude mel frames, one row per frame.
struct MelSpectrogram {
  Eigen::MatrixXd frames;  // [T x n_mels]
  double hop_s = 0.0;

  Eigen::Index num_frames() const { return frames.rows(); }
  Eigen::Index n_mels() const { return frames.cols(); }
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// n_mels + 2 edge frequencies (Hz) equally spaced on the HTK mel scale;
// band b rises from edge b, peaks at edge b+1 and falls to edge b+2.
Eigen::VectorXd mel_band_edges_hz(const MelConfig& config);

// Triangular filters over the rfft bins, [n_mels x (n_fft/2 + 1)].
Eigen::MatrixXd mel_filterbank(const MelConfig& config);

// Hann-windowed magnitude STFT without padding, so
// T = 1 + floor((len - win_length) / hop_length), then the mel filterbank
// and log(max(x, kMelMagnitudeFloor)). Throws ValidationError when the
// input is shorter than one window.
MelSpectrogram compute_mel(std::span<const double> samples,
                           const MelConfig& config);
MelSpectrogram compute_mel(const Waveform& wave, const MelConfig& config);

inline constexpr double kMaskSeconds = 0.5;

// Frames covered by a mask of `mask_s` seconds.
int mask_span_frames(double hop_s, double mask_s = kMaskSeconds);

struct MaskedView {
  MelSpectrogram mel;
  Eigen::Index start = 0;
  Eigen::Index span = 0;
  // False when the clip is not longer than the mask; `mel` is then an
  // unmodified copy.
  bool masked = false;
};

// Replaces one span of mask_span_frames(hop_s) consecutive frames, starting
// uniformly in [0, T - span), with kLogMelFloor.
MaskedView mask_view(const MelSpectrogram& mel, Rng& rng,
                     double mask_s = kMaskSeconds);

}  // namespace storystyle

#endif  // STORYSTYLE_MEL_H_
