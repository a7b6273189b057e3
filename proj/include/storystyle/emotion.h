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

#ifndef STORYSTYLE_EMOTION_H_
#define STORYSTYLE_EMOTION_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "storystyle/corpus.h"

namespace storystyle {

enum class Emotion { kNeutral, kJoy, kFear, kAnger, kSadness, kLove, kSurprise };

inline constexpr std::array<Emotion, 7> kAllEmotions = {
    Emotion::kNeutral, Emotion::kJoy,  Emotion::kFear,    Emotion::kAnger,
    Emotion::kSadness, Emotion::kLove, Emotion::kSurprise};

inline constexpr double kDefaultEmotionThreshold = 0.7;

std::string_view to_string(Emotion emotion);

// Case-sensitive lookup of the lowercase category names.
std::optional<Emotion> parse_emotion(std::string_view name);

struct LabelRecord {
  std::string utterance_id;
  Emotion raw_category = Emotion::kNeutral;
  double score = 0.0;
  Emotion effective_category = Emotion::kNeutral;
};

using LabelMap = std::map<std::string, LabelRecord, std::less<>>;

// Label file: one `id \t category \t score` per line, '#' comments allowed.
// Records come back unthresholded (effective == raw).
LabelMap parse_labels(std::string_view text,
                      std::string_view source = "<labels>");
LabelMap load_labels(const std::filesystem::path& path);

// Writes the effective category with the original score. Loading the result
// and thresholding it again at the same threshold is a no-op.
std::string serialize_labels(const LabelMap& labels);

// Scores below the threshold fall back to neutral; ties keep the raw label.
LabelRecord apply_threshold(const LabelRecord& record,
                            double threshold = kDefaultEmotionThreshold);

void apply_threshold(LabelMap& labels,
                     double threshold = kDefaultEmotionThreshold);

// Percentage per effective category over all 7 categories.
std::map<Emotion, double> label_distribution(std::span<const LabelRecord> labels);
std::map<Emotion, double> label_distribution(const LabelMap& labels);

// Fraction of within-story consecutive pairs whose effective categories are
// equal and not neutral. Throws MissingInputError naming an unlabelled id.
// Returns 0 when the manifest has no consecutive pairs.
double consecutive_match_rate(const CorpusManifest& manifest,
                              const LabelMap& labels);

}  // namespace storystyle

#endif  // STORYSTYLE_EMOTION_H_
