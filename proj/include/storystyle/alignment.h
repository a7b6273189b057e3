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

#ifndef STORYSTYLE_ALIGNMENT_H_
#define STORYSTYLE_ALIGNMENT_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace storystyle {

struct WordInterval {
  std::string word;
  double start_s = 0.0;
  double end_s = 0.0;
  // Empty text or an aligner silence marker (sil, sp, <eps>).
  bool silence = false;

  bool operator==(const WordInterval&) const = default;
};

bool is_silence_label(std::string_view text);

// Reads the word tier of a long-format Praat TextGrid, as written by forced
// aligners: the interval tier named "words" (case-insensitive), or failing
// that the first interval tier whose name contains "word". Throws
// ValidationError for a missing word tier, malformed intervals, or
// intervals that overlap or run backwards.
std::vector<WordInterval> parse_textgrid(std::string_view text,
                                         std::string_view source = "<textgrid>");
std::vector<WordInterval> load_textgrid(const std::filesystem::path& path);

// Long-format TextGrid with a single "words" interval tier.
std::string serialize_textgrid(std::span<const WordInterval> intervals);

struct PauseMeasurement {
  double pause_s = 0.0;
  // The aligner placed word k+1 before the end of word k.
  bool clamped = false;
};

// Gap between the end of the k-th and the start of the (k+1)-th non-silence
// word, k = first_sentence_word_count. Throws ValidationError when k < 1 or
// fewer than k+1 words are present.
PauseMeasurement measure_intersentence_pause(
    std::span<const WordInterval> intervals, std::size_t first_sentence_word_count);

// Words an aligner would emit for a sentence: whitespace tokens holding at
// least one letter or digit.
std::size_t count_alignable_words(std::string_view sentence);

}  // namespace storystyle

#endif  // STORYSTYLE_ALIGNMENT_H_
