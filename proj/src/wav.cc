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

#include "storystyle/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "storystyle/error.h"
#include "storystyle/text_util.h"

namespace storystyle {
namespace {

std::uint32_t read_u32(const std::string& b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t read_u16(const std::string& b, std::size_t at) {
  return static_cast<std::uint16_t>(
      static_cast<unsigned char>(b[at]) |
      static_cast<unsigned char>(b[at + 1]) << 8);
}

void put_u32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& b, std::uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  const std::string where = path.string();
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    throw ValidationError(where + ": not a RIFF/WAVE file");
  }
  Waveform wave;
  bool have_fmt = false;
  std::size_t at = 12;
  while (at + 8 <= bytes.size()) {
    const std::string id = bytes.substr(at, 4);
    const std::uint32_t size = read_u32(bytes, at + 4);
    const std::size_t body = at + 8;
    if (body + size > bytes.size()) {
      throw ValidationError(where + ": truncated '" + id + "' chunk");
    }
    if (id == "fmt ") {
      if (size < 16) throw ValidationError(where + ": short fmt chunk");
      const auto format = read_u16(bytes, body);
      const auto channels = read_u16(bytes, body + 2);
      const auto bits = read_u16(bytes, body + 14);
      if (format != 1 || channels != 1 || bits != 16) {
        throw ValidationError(where + ": expected mono 16-bit PCM (format " +
                              std::to_string(format) + ", channels " +
                              std::to_string(channels) + ", bits " +
                              std::to_string(bits) + ")");
      }
      wave.sample_rate_hz = static_cast<int>(read_u32(bytes, body + 4));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ValidationError(where + ": data before fmt chunk");
      wave.samples.resize(size / 2);
      for (std::size_t i = 0; i < wave.samples.size(); ++i) {
        wave.samples[i] = static_cast<std::int16_t>(read_u16(bytes, body + 2 * i));
      }
      return wave;
    }
    at = body + size + (size & 1);
  }
  throw ValidationError(where + ": no data chunk");
}

std::string encode_wav(const Waveform& wave) {
  const auto data_bytes =
      static_cast<std::uint32_t>(wave.samples.size() * sizeof(std::int16_t));
  std::string b;
  b.reserve(44 + data_bytes);
  b += "RIFF";
  put_u32(b, 36 + data_bytes);
  b += "WAVE";
  b += "fmt ";
  put_u32(b, 16);
  put_u16(b, 1);
  put_u16(b, 1);
  put_u32(b, static_cast<std::uint32_t>(wave.sample_rate_hz));
  put_u32(b, static_cast<std::uint32_t>(wave.sample_rate_hz) * 2);
  put_u16(b, 2);
  put_u16(b, 16);
  b += "data";
  put_u32(b, data_bytes);
  for (std::int16_t s : wave.samples) put_u16(b, static_cast<std::uint16_t>(s));
  return b;
}

void write_wav(const std::filesystem::path& path, const Waveform& wave) {
  write_text_file(path, encode_wav(wave));
}

Waveform slice_seconds(const Waveform& wave, double start_s, double end_s) {
  const auto n = static_cast<long long>(wave.samples.size());
  auto begin = std::clamp<long long>(std::llround(start_s * wave.sample_rate_hz), 0, n);
  auto end = std::clamp<long long>(std::llround(end_s * wave.sample_rate_hz), begin, n);
  Waveform out;
  out.sample_rate_hz = wave.sample_rate_hz;
  out.samples.assign(wave.samples.begin() + begin, wave.samples.begin() + end);
  return out;
}

}  // namespace storystyle
