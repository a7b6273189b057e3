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

#ifndef STORYSTYLE_AUGMENT_H_
#define STORYSTYLE_AUGMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "storystyle/corpus.h"
#include "storystyle/emotion.h"
#include "storystyle/rng.h"
#include "storystyle/wav.h"

namespace storystyle {

inline constexpr char kTextTerminator = '~';

enum class PairingMode {
  // Adjacent sentences of the same story, labels ignored.
  kConsecutive,
  // Random pairs drawn inside each effective-emotion bucket.
  kEmotionMatched,
};

std::string_view to_string(PairingMode mode);
std::optional<PairingMode> parse_pairing_mode(std::string_view name);

struct PairingPolicy {
  PairingMode mode = PairingMode::kEmotionMatched;
  bool include_neutral = true;
  int max_pairs_per_utterance = 1;
  // Emotion buckets are formed per story unless set.
  bool cross_story = false;
  std::uint64_t seed = 0;
};

struct PairCandidate {
  std::string first_id;
  std::string second_id;
  // Shared effective label; absent for consecutive pairs.
  std::optional<Emotion> emotion;

  bool operator==(const PairCandidate&) const = default;
};

// Consecutive mode returns every within-story adjacent pair in manifest
// order. Emotion-matched mode groups utterances by effective category (and
// by story unless policy.cross_story) and,
// for each of max_pairs_per_utterance rounds, shuffles every bucket and pairs
// neighbours (0,1), (2,3), ... An ordered pair is emitted at most once and
// no utterance is paired with itself. Output is a function of the inputs and
// policy.seed only.
std::vector<PairCandidate> build_pairs(const CorpusManifest& manifest,
                                       const LabelMap& labels,
                                       const PairingPolicy& policy);

// Normal(mean_s, std_s) restricted to [0, cutoff_s] by rejection.
double sample_pause(const PauseDistribution& dist, Rng& rng);

// first ++ round(pause_s * sr) zero samples ++ second.
Waveform render_pair(const Waveform& first, const Waveform& second,
                     double pause_s, int sample_rate_hz);

// Appends the end-of-text symbol. A trailing symbol already present is kept
// single; one anywhere else is rejected.
std::string terminate_text(std::string_view text);

// first + " " + second + "~".
std::string join_texts(std::string_view first, std::string_view second);

struct AugmentedPair {
  std::string pair_id;
  std::string first_id;
  std::string second_id;
  std::optional<Emotion> emotion;
  double pause_s = 0.0;
  std::string joined_text;
  // Relative to the output directory.
  std::string audio_path;
};

// Draws one pause per candidate (in order) and fills ids, texts and paths.
std::vector<AugmentedPair> plan_augmented_pairs(
    const CorpusManifest& manifest, std::span<const PairCandidate> candidates,
    const PauseDistribution& dist, Rng& rng);

struct AugmentedOutput {
  std::filesystem::path manifest_path;
  std::filesystem::path metadata_path;
};

inline constexpr std::string_view kAugmentedManifestName = "manifest.tsv";
inline constexpr std::string_view kPairMetadataName = "pairs.tsv";

// Renders every pair into out_dir/<audio_path>, then writes a corpus-format
// manifest whose text is the joined text and a sidecar
// `pair_id \t first_id \t second_id \t emotion \t pause_s` file. Emotion is
// "-" for consecutive pairs. Existing files are overwritten; two pairs
// sharing an id or output path raise ValidationError.
AugmentedOutput emit_augmented_manifest(const CorpusManifest& source,
                                        std::span<const AugmentedPair> pairs,
                                        const std::filesystem::path& out_dir);

// Sentence audio cut from its page recording. Throws ValidationError when
// the recording's rate differs from the manifest's.
Waveform load_utterance_audio(const CorpusManifest& manifest,
                              const UtteranceRecord& record);

struct PairMetadata {
  std::string pair_id;
  std::string first_id;
  std::string second_id;
  std::optional<Emotion> emotion;
  double pause_s = 0.0;
};

std::string serialize_pair_metadata(std::span<const AugmentedPair> pairs);
std::vector<PairMetadata> parse_pair_metadata(std::string_view text,
                                              std::string_view source = "<pairs>");
std::vector<PairMetadata> load_pair_metadata(const std::filesystem::path& path);

// One message per pair whose parents do not share its recorded effective
// label. Pairs without a label are skipped.
std::vector<std::string> audit_emotion_consistency(
    std::span<const PairMetadata> pairs, const LabelMap& labels);

// One message per record whose text holds the terminator anywhere but at
// the very end, or does not end with it.
std::vector<std::string> audit_terminators(const CorpusManifest& manifest);

}  // namespace storystyle

#endif  // STORYSTYLE_AUGMENT_H_
