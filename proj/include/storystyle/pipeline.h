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

#ifndef STORYSTYLE_PIPELINE_H_
#define STORYSTYLE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "storystyle/augment.h"
#include "storystyle/kv_config.h"
#include "storystyle/style_model.h"

namespace storystyle {

// Settings shared by all subcommands. Loaded from a flat key = value file;
// relative paths resolve against the file's directory. See README for the
// key list.
struct PipelineConfig {
  std::filesystem::path manifest;     // corpus manifest
  std::filesystem::path labels;       // classifier output to threshold
  std::optional<std::string> classifier;  // endpoint; replaces `labels`
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;

  double pause_cutoff_s = kDefaultPauseCutoffS;
  double emotion_threshold = kDefaultEmotionThreshold;

  PairingMode pairing_mode = PairingMode::kEmotionMatched;
  bool include_neutral = true;
  int max_pairs_per_utterance = 1;
  bool cross_story = false;

  StyleConfig style;
  std::int64_t train_steps = 50;
  int batch_size = 8;
  bool resume = false;

  // Held-out evaluation; eval_manifest defaults to `manifest`, eval_labels
  // to the label stage output.
  std::filesystem::path eval_manifest;
  std::filesystem::path eval_labels;
  std::filesystem::path alignments_dir;
  // Optional second system, compared against the same ground truth.
  std::filesystem::path baseline_alignments_dir;
  double probe_test_fraction = 0.25;
  int probe_repeats = 50;

  std::filesystem::path stats_dir() const { return out_dir; }
  std::filesystem::path labels_out() const { return out_dir / "labels.tsv"; }
  std::filesystem::path augmented_dir() const { return out_dir / "augmented"; }
  std::filesystem::path style_dir() const { return out_dir / "style"; }
  std::filesystem::path checkpoint_path() const { return style_dir() / "checkpoint.bin"; }
  std::filesystem::path eval_dir() const { return out_dir / "eval"; }

  // Seed of a stochastic stage: derive_seed(seed, stage).
  std::uint64_t stage_seed(std::string_view stage) const;
};

// Throws ValidationError on unknown keys or malformed values.
PipelineConfig pipeline_config_from(const KeyValueConfig& kv,
                                    const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct CommandResult {
  std::string report;  // printed to stdout
  std::vector<std::filesystem::path> outputs;
};

// Length statistics for groups of 1-3 consecutive utterances and the pause
// fit. Writes stats.txt and stats.tsv.
CommandResult cmd_stats(const PipelineConfig& config);

// Thresholds `labels` (or queries `classifier` per utterance) and writes
// labels.tsv plus label_stats.tsv (distribution, consecutive match rate).
CommandResult cmd_label(const PipelineConfig& config);

// Pairs, pauses, renders and writes augmented/{manifest.tsv,pairs.tsv,wav/}.
CommandResult cmd_augment(const PipelineConfig& config);

// Trains the style module on the augmented corpus; writes
// style/checkpoint.bin and style/loss_log.tsv. With `resume`, continues from
// the checkpoint and appends to the log.
CommandResult cmd_train_style(const PipelineConfig& config);

// Pause K-S test against alignments, TP-GST L1 and the emotion probe over a
// held-out manifest. Writes eval/report.txt and eval/metrics.tsv.
CommandResult cmd_eval(const PipelineConfig& config);

}  // namespace storystyle

#endif  // STORYSTYLE_PIPELINE_H_
