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

#include "storystyle/emotion.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "storystyle/error.h"
#include "storystyle/text_util.h"

namespace storystyle {

std::string_view to_string(Emotion emotion) {
  switch (emotion) {
    case Emotion::kNeutral: return "neutral";
    case Emotion::kJoy: return "joy";
    case Emotion::kFear: return "fear";
    case Emotion::kAnger: return "anger";
    case Emotion::kSadness: return "sadness";
    case Emotion::kLove: return "love";
    case Emotion::kSurprise: return "surprise";
  }
  return "neutral";
}

std::optional<Emotion> parse_emotion(std::string_view name) {
  for (Emotion e : kAllEmotions) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

LabelMap parse_labels(std::string_view text, std::string_view source) {
  const std::string src(source);
  LabelMap labels;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(src, line_no,
                       "expected 3 tab-separated fields (id, category, score)");
    }
    LabelRecord rec;
    rec.utterance_id = std::string(trim(fields[0]));
    if (rec.utterance_id.empty()) throw ParseError(src, line_no, "empty id");
    auto category = parse_emotion(trim(fields[1]));
    if (!category) {
      throw ParseError(src, line_no,
                       "unknown emotion category '" +
                           std::string(trim(fields[1])) + "'");
    }
    auto score = parse_double(fields[2]);
    if (!score) throw ParseError(src, line_no, "invalid score");
    if (*score < 0.0 || *score > 1.0) {
      throw ParseError(src, line_no,
                       "score " + format_double(*score) + " outside [0, 1]");
    }
    rec.raw_category = *category;
    rec.effective_category = *category;
    rec.score = *score;
    if (labels.contains(rec.utterance_id)) {
      throw ParseError(src, line_no,
                       "duplicate utterance id '" + rec.utterance_id + "'");
    }
    labels.emplace(rec.utterance_id, std::move(rec));
  }
  return labels;
}

LabelMap load_labels(const std::filesystem::path& path) {
  return parse_labels(read_text_file(path), path.string());
}

std::string serialize_labels(const LabelMap& labels) {
  std::ostringstream out;
  out << "# id\tcategory\tscore\n";
  for (const auto& [id, rec] : labels) {
    out << id << '\t' << to_string(rec.effective_category) << '\t'
        << format_double(rec.score) << '\n';
  }
  return out.str();
}

LabelRecord apply_threshold(const LabelRecord& record, double threshold) {
  LabelRecord out = record;
  out.effective_category =
      record.score >= threshold ? record.raw_category : Emotion::kNeutral;
  return out;
}

void apply_threshold(LabelMap& labels, double threshold) {
  for (auto& [id, rec] : labels) rec = apply_threshold(rec, threshold);
}

std::map<Emotion, double> label_distribution(
    std::span<const LabelRecord> labels) {
  if (labels.empty()) {
    throw ValidationError("label distribution of an empty collection");
  }
  std::map<Emotion, std::int64_t> counts;
  for (Emotion e : kAllEmotions) counts[e] = 0;
  for (const auto& rec : labels) ++counts[rec.effective_category];
  std::map<Emotion, double> percent;
  const double total = static_cast<double>(labels.size());
  for (const auto& [e, c] : counts) {
    percent[e] = 100.0 * static_cast<double>(c) / total;
  }
  return percent;
}

std::map<Emotion, double> label_distribution(const LabelMap& labels) {
  std::vector<LabelRecord> recs;
  recs.reserve(labels.size());
  for (const auto& [id, rec] : labels) recs.push_back(rec);
  return label_distribution(std::span<const LabelRecord>(recs));
}

double consecutive_match_rate(const CorpusManifest& manifest,
                              const LabelMap& labels) {
  auto label_of = [&](const UtteranceRecord& r) {
    auto it = labels.find(r.id);
    if (it == labels.end()) {
      throw MissingInputError("no emotion label for utterance '" + r.id + "'");
    }
    return it->second.effective_category;
  };
  for (const auto& r : manifest.records) label_of(r);

  std::int64_t pairs = 0;
  std::int64_t matched = 0;
  for (const auto& span : story_spans(manifest)) {
    for (std::size_t i = span.begin; i + 1 < span.end; ++i) {
      const Emotion a = label_of(manifest.records[i]);
      const Emotion b = label_of(manifest.records[i + 1]);
      ++pairs;
      if (a == b && a != Emotion::kNeutral) ++matched;
    }
  }
  if (pairs == 0) return 0.0;
  return static_cast<double>(matched) / static_cast<double>(pairs);
}

}  // namespace storystyle
