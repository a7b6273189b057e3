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

#ifndef STORYSTYLE_WAV_H_
#define STORYSTYLE_WAV_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace storystyle {

// Mono 16-bit PCM audio.
struct Waveform {
  std::vector<std::int16_t> samples;
  int sample_rate_hz = 0;

  double duration_s() const {
    return sample_rate_hz > 0
               ? static_cast<double>(samples.size()) / sample_rate_hz
               : 0.0;
  }
};

// Reads a RIFF/WAVE file holding mono 16-bit PCM. Other layouts raise
// ValidationError; a missing file raises MissingInputError.
Waveform read_wav(const std::filesystem::path& path);

// Canonical 44-byte-header RIFF/WAVE, mono, 16-bit PCM.
std::string encode_wav(const Waveform& wave);
void write_wav(const std::filesystem::path& path, const Waveform& wave);

// Samples [round(start_s*sr), round(end_s*sr)) clamped to the waveform.
Waveform slice_seconds(const Waveform& wave, double start_s, double end_s);

}  // namespace storystyle

#endif  // STORYSTYLE_WAV_H_
