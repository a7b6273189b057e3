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

#ifndef STORYSTYLE_CORPUS_H_
#define STORYSTYLE_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace storystyle {

inline constexpr int kDefaultSampleRateHz = 22050;
inline constexpr double kDefaultPauseCutoffS = 1.0;

// One segmented sentence. start_s/end_s locate it inside audio_path.
struct UtteranceRecord {
  std::string id;
  std::string story_id;
  std::int64_t position = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string audio_path;
  std::string text;

  double duration_s() const { return end_s - start_s; }
};

// Validated utterance list, sorted by (story_id, position).
//
// File format: UTF-8, one record per line, tab separated:
//
//   id  story_id  position  start_s  end_s  audio_path  text
//
// Lines starting with '#' are comments. A comment of the form
// `# sample_rate_hz: N` sets the sample rate (default 22050). Relative
// audio paths are resolved against `base_dir`, the manifest's directory.
struct CorpusManifest {
  std::vector<UtteranceRecord> records;
  int sample_rate_hz = kDefaultSampleRateHz;
  std::filesystem::path base_dir;

  std::filesystem::path resolve_audio(const UtteranceRecord& record) const;
  const UtteranceRecord* find(std::string_view id) const;
};

// Parses and validates manifest text. `source` names the input in error
// messages. Throws ParseError (with 1-based line) or ValidationError.
CorpusManifest parse_manifest(std::string_view text,
                              std::string_view source = "<manifest>");

CorpusManifest load_manifest(const std::filesystem::path& path);

std::string serialize_manifest(const CorpusManifest& manifest);

// Checks every manifest invariant; throws ValidationError on the first
// violation. Called by parse_manifest after sorting.
void validate_manifest(const CorpusManifest& manifest);

// Index ranges [begin, end) into manifest.records, one per story, in order.
struct StorySpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};
std::vector<StorySpan> story_spans(const CorpusManifest& manifest);

struct LengthStats {
  std::int64_t count = 0;
  double mean_s = 0.0;
  double min_s = 0.0;
  double max_s = 0.0;
};

// Durations of every run of `group_size` consecutive sentences inside a
// story, measured from the first start to the last end. Runs never cross
// story boundaries.
std::vector<double> group_durations(const CorpusManifest& manifest,
                                    int group_size);

// Throws ValidationError on an empty manifest, group_size < 1, or when no
// group fits in any story.
LengthStats compute_length_stats(const CorpusManifest& manifest,
                                 int group_size);

struct PauseExtraction {
  std::vector<double> pauses;
  // Consecutive pairs whose labels overlapped; their pause was clamped to 0.
  std::int64_t n_clamped = 0;
};

PauseExtraction extract_pauses(const CorpusManifest& manifest);

struct PauseDistribution {
  double mean_s = 0.0;
  double std_s = 0.0;
  double cutoff_s = kDefaultPauseCutoffS;
  std::int64_t n_samples = 0;
  std::int64_t n_excluded = 0;
};

// Normal fit over pauses <= cutoff_s; larger values are outliers. Uses the
// n-1 sample standard deviation. The result does not depend on input order.
PauseDistribution fit_pause_distribution(std::span<const double> pauses,
                                         double cutoff_s = kDefaultPauseCutoffS);

}  // namespace storystyle

#endif  // STORYSTYLE_CORPUS_H_
