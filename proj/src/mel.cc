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

#include "storystyle/mel.h"

#include <fftw3.h>

#include <mutex>
#include <numbers>
#include <vector>

#include "storystyle/error.h"

namespace storystyle {
namespace {

// FFTW planning is not thread safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void MelConfig::validate() const {
  if (sample_rate_hz <= 0 || n_fft <= 0 || win_length <= 0 ||
      hop_length <= 0 || n_mels <= 0) {
    throw ValidationError("mel config sizes must be positive");
  }
  if (win_length > n_fft) {
    throw ValidationError("win_length must not exceed n_fft");
  }
  if (!(fmin_hz >= 0.0 && fmin_hz < fmax_hz &&
        fmax_hz <= sample_rate_hz / 2.0)) {
    throw ValidationError("mel band limits must satisfy 0 <= fmin < fmax <= sr/2");
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Eigen::VectorXd mel_band_edges_hz(const MelConfig& config) {
  const double lo = hz_to_mel(config.fmin_hz);
  const double hi = hz_to_mel(config.fmax_hz);
  Eigen::VectorXd edges(config.n_mels + 2);
  for (int i = 0; i < config.n_mels + 2; ++i) {
    edges[i] = mel_to_hz(lo + (hi - lo) * i / (config.n_mels + 1));
  }
  return edges;
}

Eigen::MatrixXd mel_filterbank(const MelConfig& config) {
  config.validate();
  const int n_bins = config.n_fft / 2 + 1;
  const Eigen::VectorXd edges = mel_band_edges_hz(config);
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(config.n_mels, n_bins);
  for (int b = 0; b < config.n_mels; ++b) {
    const double left = edges[b], center = edges[b + 1], right = edges[b + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * config.sample_rate_hz / config.n_fft;
      if (f > left && f < right) {
        fb(b, k) = f <= center ? (f - left) / (center - left)
                               : (right - f) / (right - center);
      }
    }
  }
  return fb;
}

MelSpectrogram compute_mel(std::span<const double> samples,
                           const MelConfig& config) {
  config.validate();
  const auto len = static_cast<long>(samples.size());
  if (len < config.win_length) {
    throw ValidationError("audio of " + std::to_string(len) +
                          " samples is shorter than one analysis window (" +
                          std::to_string(config.win_length) + ")");
  }
  const long n_frames = 1 + (len - config.win_length) / config.hop_length;
  const int n_bins = config.n_fft / 2 + 1;
  const Eigen::MatrixXd fb = mel_filterbank(config);

  // Periodic Hann window centred in the FFT frame.
  std::vector<double> window(config.win_length);
  for (int i = 0; i < config.win_length; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / config.win_length);
  }
  const int offset = (config.n_fft - config.win_length) / 2;

  double* in = fftw_alloc_real(config.n_fft);
  fftw_complex* out = fftw_alloc_complex(n_bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(config.n_fft, in, out, FFTW_ESTIMATE);
  }

  MelSpectrogram mel;
  mel.hop_s = config.hop_s();
  mel.frames.resize(n_frames, config.n_mels);
  Eigen::VectorXd magnitude(n_bins);
  for (long t = 0; t < n_frames; ++t) {
    std::fill(in, in + config.n_fft, 0.0);
    const long base = t * config.hop_length;
    for (int i = 0; i < config.win_length; ++i) {
      in[offset + i] = samples[base + i] * window[i];
    }
    fftw_execute(plan);
    for (int k = 0; k < n_bins; ++k) {
      magnitude[k] = std::hypot(out[k][0], out[k][1]);
    }
    const Eigen::VectorXd energy = fb * magnitude;
    for (int b = 0; b < config.n_mels; ++b) {
      mel.frames(t, b) = std::log(std::max(energy[b], kMelMagnitudeFloor));
    }
  }

  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return mel;
}

MelSpectrogram compute_mel(const Waveform& wave, const MelConfig& config) {
  if (wave.sample_rate_hz != config.sample_rate_hz) {
    throw ValidationError("waveform rate " + std::to_string(wave.sample_rate_hz) +
                          " Hz does not match mel config rate " +
                          std::to_string(config.sample_rate_hz) + " Hz");
  }
  std::vector<double> x(wave.samples.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = wave.samples[i] / 32768.0;
  return compute_mel(x, config);
}

int mask_span_frames(double hop_s, double mask_s) {
  if (!(hop_s > 0.0)) throw ValidationError("hop_s must be positive");
  return static_cast<int>(std::lround(mask_s / hop_s));
}

MaskedView mask_view(const MelSpectrogram& mel, Rng& rng, double mask_s) {
  MaskedView view;
  view.mel = mel;
  view.span = mask_span_frames(mel.hop_s, mask_s);
  const Eigen::Index frames = mel.num_frames();
  if (view.span <= 0 || frames <= view.span) return view;
  view.start = static_cast<Eigen::Index>(
      rng.uniform_index(static_cast<std::uint64_t>(frames - view.span)));
  view.mel.frames.middleRows(view.start, view.span).setConstant(kLogMelFloor);
  view.masked = true;
  return view;
}

}  // namespace storystyle
