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

#ifndef STORYSTYLE_TRAINER_H_
#define STORYSTYLE_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "storystyle/kv_config.h"
#include "storystyle/mel.h"
#include "storystyle/rng.h"
#include "storystyle/style_model.h"

namespace storystyle {

// Reads the style keys (n_mels, conv_channels, d_style, temperature, ...)
// on top of `base`. Unknown keys are left for the caller to report.
StyleConfig style_config_from(const KeyValueConfig& kv, StyleConfig base = {});
KeyValueConfig style_config_to_kv(const StyleConfig& config);

// One training example: the (possibly two-sentence) audio and its text.
struct StyleSample {
  std::string id;
  MelSpectrogram mel;
  std::string text;
  std::optional<Eigen::Index> sentence_boundary;
};

// Boundary of a joined text: the first sentence plus its separating space.
Eigen::Index joined_text_boundary(std::string_view first_sentence);

struct StepReport {
  std::int64_t step = 0;
  double total = 0.0;
  double l1 = 0.0;
  double simclr = 0.0;
  int gst_conditioned = 0;
  int tpgst_conditioned = 0;
};

// Loss of one batch and, when `grad` is non-null, its gradient (grad must
// be shaped like model.params; it is overwritten).
//
// Per sample: GST embedding g of the full mel (a fixed L1 target); one TP-GST
// prediction per sentence compared to g by mean absolute difference; a
// Bernoulli(conditioning_prob) draw choosing the conditioning source; two
// masked views of the mel passed through the reference encoder and GST for
// the contrastive term. total = l1 + simclr_scale * nt_xent.
//
// RNG draws happen per sample in order: conditioning, view 1 mask, view 2
// mask. The contrastive term needs at least two samples and is skipped (0)
// for a single-sample batch.
StepReport evaluate_batch(const StyleModel& model,
                          std::span<const StyleSample> batch, Rng& rng,
                          StyleParams* grad);

// evaluate_batch followed by one plain gradient step with the configured
// learning rate. Throws NumericError naming `step` on a non-finite loss; the
// model is left untouched in that case.
StepReport training_step(StyleModel& model, std::span<const StyleSample> batch,
                         Rng& rng, std::int64_t step);

// Runs steps [first_step, first_step + steps). Step s draws its batch and
// masks from Rng(derive_seed(seed, s)), so a resumed run continues
// identically.
std::vector<StepReport> train_style(
    StyleModel& model, std::span<const StyleSample> samples, int batch_size,
    std::uint64_t seed, std::int64_t first_step, std::int64_t steps,
    const std::function<void(const StepReport&)>& on_step = {});

std::string format_step_report(const StepReport& report);
inline constexpr std::string_view kLossLogHeader =
    "step\ttotal\tl1\tsimclr\tgst_conditioned\ttpgst_conditioned";

// Checkpoint layout (little endian):
//   "STYLECKP" magic, u32 version (1), i64 step,
//   u64 config length + config text (style_config_to_kv),
//   u64 tensor count, then per tensor:
//   u32 name length + name, u64 rows, u64 cols, rows*cols f64 row-major.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  StyleModel model;
  std::int64_t step = 0;
};

std::string encode_checkpoint(const StyleModel& model, std::int64_t step);
Checkpoint decode_checkpoint(std::string_view bytes,
                             std::string_view source = "<checkpoint>");
void save_checkpoint(const std::filesystem::path& path, const StyleModel& model,
                     std::int64_t step);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace storystyle

#endif  // STORYSTYLE_TRAINER_H_
