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

// Writes the synthetic 20-utterance test corpus: four story pages of tones
// separated by silence, raw classifier labels, word alignments for two
// systems and a pipeline config. Every value is fixed by the tables below.
//
//   make_fixture OUT_DIR

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "storystyle/alignment.h"
#include "storystyle/corpus.h"
#include "storystyle/emotion.h"
#include "storystyle/text_util.h"
#include "storystyle/wav.h"

namespace ss = storystyle;
namespace fs = std::filesystem;

namespace {

constexpr int kSampleRate = 16000;
constexpr double kLeadS = 0.2;
constexpr double kTailS = 0.3;

struct Utterance {
  const char* text;
  const char* category;  // raw classifier output
  double score;
  double duration_s;
  double gap_after_s;    // to the next utterance in the story
  double system_pause_s; // what the "system" alignment shows after it
  double baseline_pause_s;
};

// Five utterances per story. The last gap of each story is unused.
constexpr std::array<std::array<Utterance, 5>, 4> kStories = {{
    {{
        {"The boat left the harbor at dawn.", "joy", 0.93, 1.10, 0.42, 0.45, 0.10},
        {"Gulls followed it out past the rocks.", "joy", 0.88, 1.25, 0.55, 0.50, 0.10},
        {"Nobody on shore waved goodbye.", "sadness", 0.81, 1.00, 0.61, 0.66, 0.10},
        {"The wind turned cold by noon.", "fear", 0.64, 0.95, 0.38, 0.40, 0.10},
        {"Still, the crew sang all the way home.", "joy", 0.97, 1.30, 0.0, 0.0, 0.0},
    }},
    {{
        {"Mara found the letter under the door.", "surprise", 0.58, 1.20, 0.47, 0.52, 0.10},
        {"Her brother had gone for good.", "sadness", 0.90, 0.98, 0.72, 0.70, 0.10},
        {"She sat by the window until dark.", "sadness", 0.86, 1.15, 1.20, 0.95, 0.10},
        {"Then she lit a single candle.", "neutral", 0.77, 0.90, 0.33, 0.30, 0.10},
        {"It burned until the morning came.", "sadness", 0.74, 1.05, 0.0, 0.0, 0.0},
    }},
    {{
        {"The gate slammed against the wall.", "anger", 0.91, 1.00, 0.29, 0.35, 0.10},
        {"How dare they break our lock again!", "anger", 0.95, 1.20, 0.51, 0.48, 0.10},
        {"Father shouted down the empty road.", "anger", 0.83, 1.10, 0.66, 0.60, 0.10},
        {"The thieves were long gone by then.", "neutral", 0.71, 1.05, 0.44, 0.41, 0.10},
        {"We fixed the gate with rope.", "neutral", 0.66, 0.92, 0.0, 0.0, 0.0},
    }},
    {{
        {"Grandma baked bread every Sunday.", "love", 0.62, 1.05, 0.58, 0.55, 0.10},
        {"The kitchen smelled warm and sweet.", "joy", 0.89, 1.10, -0.02, 0.02, 0.10},
        {"We ate it with fresh butter.", "joy", 0.84, 0.96, 0.49, 0.52, 0.10},
        {"She laughed at every crumb we dropped.", "joy", 0.92, 1.22, 0.36, 0.39, 0.10},
        {"Those were the best days of all.", "neutral", 0.81, 1.08, 0.0, 0.0, 0.0},
    }},
}};

double base_frequency(std::string_view category) {
  if (category == "joy") return 320.0;
  if (category == "fear") return 400.0;
  if (category == "anger") return 260.0;
  if (category == "sadness") return 140.0;
  if (category == "love") return 220.0;
  if (category == "surprise") return 360.0;
  return 180.0;
}

// Harmonic tone with 20 ms fades and a 4 Hz syllable-rate envelope.
void add_tone(std::vector<double>& page, double start_s, double duration_s,
              double f0) {
  const auto first = static_cast<std::size_t>(std::llround(start_s * kSampleRate));
  const auto n = static_cast<std::size_t>(std::llround(duration_s * kSampleRate));
  const double fade = 0.02 * kSampleRate;
  for (std::size_t i = 0; i < n && first + i < page.size(); ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    const double edge = std::min({1.0, static_cast<double>(i) / fade,
                                  static_cast<double>(n - i) / fade});
    const double syllable = 0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * 4.0 * t);
    double v = 0.0;
    for (int h = 1; h <= 3; ++h) {
      v += std::sin(2.0 * std::numbers::pi * f0 * h * t) / h;
    }
    page[first + i] += 0.25 * edge * syllable * v;
  }
}

// Word intervals for "sentence one <pause> sentence two", words evenly
// spaced across each sentence's duration.
std::vector<ss::WordInterval> pair_alignment(const Utterance& a, const Utterance& b,
                                             double pause_s) {
  std::vector<ss::WordInterval> out;
  double t = 0.0;
  auto silence = [&](double d) {
    out.push_back({"", t, t + d, true});
    t += d;
  };
  auto sentence = [&](const Utterance& u) {
    const auto words = ss::split_ws(u.text);
    const double each = u.duration_s / static_cast<double>(words.size());
    for (auto w : words) {
      std::string clean;
      for (char c : w) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
          clean.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
      }
      out.push_back({clean, t, t + each, false});
      t += each;
    }
  };
  silence(0.15);
  sentence(a);
  if (pause_s > 0.0) silence(pause_s);
  sentence(b);
  silence(0.2);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture OUT_DIR\n";
    return 1;
  }
  const fs::path out(argv[1]);
  try {
    ss::CorpusManifest manifest;
    manifest.sample_rate_hz = kSampleRate;
    std::string labels = "# id\tcategory\tscore\n";
    int uid = 0;
    for (std::size_t s = 0; s < kStories.size(); ++s) {
      const auto& story = kStories[s];
      const std::string story_id = "story" + std::to_string(s + 1);
      const std::string wav_rel = "wav/" + story_id + ".wav";
      double total = kLeadS + kTailS;
      for (std::size_t i = 0; i < story.size(); ++i) {
        total += story[i].duration_s + (i + 1 < story.size() ? story[i].gap_after_s : 0.0);
      }
      std::vector<double> page(
          static_cast<std::size_t>(std::llround(total * kSampleRate)), 0.0);
      double t = kLeadS;
      for (std::size_t i = 0; i < story.size(); ++i) {
        const auto& u = story[i];
        char id[16];
        std::snprintf(id, sizeof id, "utt%02d", ++uid);
        add_tone(page, t, u.duration_s, base_frequency(u.category));
        // Round timings to the millisecond so the manifest is exact.
        const double start = std::round(t * 1000.0) / 1000.0;
        const double end = std::round((t + u.duration_s) * 1000.0) / 1000.0;
        manifest.records.push_back({id, story_id, static_cast<std::int64_t>(i), start,
                                    end, wav_rel, u.text});
        labels += std::string(id) + "\t" + u.category + "\t" + ss::format_double(u.score) + "\n";
        if (i + 1 < story.size()) {
          const auto& next = story[i + 1];
          for (const char* system : {"system", "baseline"}) {
            const double pause = std::string_view(system) == "system"
                                     ? u.system_pause_s
                                     : u.baseline_pause_s;
            const auto grid = pair_alignment(u, next, pause);
            ss::write_text_file(out / "alignments" / system / (std::string(id) + ".TextGrid"),
                                ss::serialize_textgrid(grid));
          }
          t += u.duration_s + u.gap_after_s;
        }
      }
      ss::Waveform wave;
      wave.sample_rate_hz = kSampleRate;
      wave.samples.reserve(page.size());
      for (double v : page) {
        wave.samples.push_back(static_cast<std::int16_t>(
            std::lround(std::clamp(v, -1.0, 1.0) * 32767.0)));
      }
      fs::create_directories(out / "wav");
      ss::write_wav(out / wav_rel, wave);
    }
    ss::write_text_file(out / "manifest.tsv", ss::serialize_manifest(manifest));
    ss::write_text_file(out / "labels_raw.tsv", labels);
    ss::write_text_file(out / "pipeline.conf",
                        "# Synthetic fixture corpus pipeline.\n"
                        "manifest = manifest.tsv\n"
                        "labels = labels_raw.tsv\n"
                        "alignments_dir = alignments/system\n"
                        "baseline_alignments_dir = alignments/baseline\n"
                        "seed = 20260101\n"
                        "sample_rate_hz = 16000\n"
                        "n_mels = 40\n"
                        "pairing_mode = emotion\n"
                        "max_pairs_per_utterance = 2\n"
                        "train_steps = 50\n"
                        "batch_size = 8\n");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
