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

// Helpers shared by the unit and acceptance tests.

#ifndef STORYSTYLE_TESTS_TEST_SUPPORT_H_
#define STORYSTYLE_TESTS_TEST_SUPPORT_H_

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "storystyle/corpus.h"
#include "storystyle/emotion.h"
#include "storystyle/mel.h"
#include "storystyle/rng.h"
#include "storystyle/style_model.h"
#include "storystyle/trainer.h"

namespace storystyle::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("storystyle_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Random manifest: stories of 1..max_story records with positive durations
// and gaps in [-0.1, 1.5] seconds.
inline CorpusManifest random_manifest(Rng& rng, int n_stories, int max_story) {
  CorpusManifest m;
  int uid = 0;
  for (int s = 0; s < n_stories; ++s) {
    const int n = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_story)));
    double t = rng.uniform() * 2.0;
    for (int i = 0; i < n; ++i) {
      const double d = 0.3 + 3.0 * rng.uniform();
      UtteranceRecord r;
      r.id = "u" + std::to_string(uid++);
      r.story_id = "s" + std::to_string(s);
      r.position = i;
      r.start_s = t;
      r.end_s = t + d;
      r.audio_path = "wav/" + r.story_id + ".wav";
      r.text = "sentence " + r.id + ".";
      m.records.push_back(r);
      // Keep starts strictly increasing even with overlaps.
      t += d + std::max(-0.1 * d, -0.1 + 1.6 * rng.uniform());
    }
  }
  return m;
}

inline Emotion random_emotion(Rng& rng) {
  return kAllEmotions[rng.uniform_index(kAllEmotions.size())];
}

inline LabelMap random_labels(const CorpusManifest& m, Rng& rng, double threshold) {
  LabelMap labels;
  for (const auto& r : m.records) {
    LabelRecord rec{r.id, random_emotion(rng), rng.uniform(), Emotion::kNeutral};
    rec.effective_category = rec.raw_category;
    labels[r.id] = apply_threshold(rec, threshold);
  }
  return labels;
}

inline nn::Vec random_vec(Rng& rng, Eigen::Index n, double scale = 1.0) {
  nn::Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.normal();
  return v;
}

inline nn::Mat random_mat(Rng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  nn::Mat m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = scale * rng.normal();
  }
  return m;
}

// Model small enough for exhaustive finite-difference checks.
inline StyleConfig tiny_style_config() {
  StyleConfig c;
  c.mel.n_mels = 8;
  c.conv_channels = {2, 3};
  c.ref_gru_units = 4;
  c.d_query = 4;
  c.n_tokens = 4;
  c.n_heads = 2;
  c.d_token = 4;
  c.d_style = 8;
  c.text_embed_dim = 3;
  c.text_units = 4;
  c.tpgst_hidden = 5;
  return c;
}

// Log-mel-like frames in [kLogMelFloor, 0].
inline MelSpectrogram random_mel(Rng& rng, Eigen::Index frames, Eigen::Index n_mels,
                                 double hop_s) {
  MelSpectrogram mel;
  mel.hop_s = hop_s;
  mel.frames.resize(frames, n_mels);
  for (Eigen::Index j = 0; j < n_mels; ++j) {
    for (Eigen::Index i = 0; i < frames; ++i) {
      mel.frames(i, j) = kLogMelFloor * rng.uniform();
    }
  }
  return mel;
}

inline std::string random_sentence(Rng& rng, int words) {
  static const char* kWords[] = {"the", "boat", "sang", "quiet", "storm",
                                 "home", "light", "bread", "cold", "a"};
  std::string s;
  for (int w = 0; w < words; ++w) {
    if (w) s += ' ';
    s += kWords[rng.uniform_index(10)];
  }
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

// Two-sentence sample with a random mel of `frames` frames.
inline StyleSample random_sample(Rng& rng, const StyleConfig& config, Eigen::Index frames,
                                 const std::string& id) {
  StyleSample s;
  s.id = id;
  s.mel = random_mel(rng, frames, config.mel.n_mels, config.mel.hop_s());
  const std::string first = random_sentence(rng, 2 + static_cast<int>(rng.uniform_index(3)));
  const std::string second = random_sentence(rng, 2 + static_cast<int>(rng.uniform_index(3)));
  s.text = first + " " + second + "~";
  s.sentence_boundary = joined_text_boundary(first);
  return s;
}

// Harmonic tone mel; samples differ in pitch, level and length so the
// style targets differ.
inline std::vector<StyleSample> tone_samples(const StyleConfig& config, int count,
                                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<StyleSample> out;
  const int sr = config.mel.sample_rate_hz;
  for (int k = 0; k < count; ++k) {
    const double f0 = 120.0 + 40.0 * k;
    const double amp = 0.05 + 0.3 * rng.uniform();
    const auto n = static_cast<std::size_t>(sr * (1.0 + 0.5 * rng.uniform()));
    std::vector<double> wave(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sr;
      wave[i] = amp * (std::sin(2 * std::numbers::pi * f0 * t) +
                       0.5 * std::sin(4 * std::numbers::pi * f0 * t)) *
                (0.6 + 0.4 * std::sin(2 * std::numbers::pi * 3.0 * t));
    }
    StyleSample s;
    s.id = "tone" + std::to_string(k);
    s.mel = compute_mel(wave, config.mel);
    const std::string first = random_sentence(rng, 3);
    s.text = first + " " + random_sentence(rng, 4) + "~";
    s.sentence_boundary = joined_text_boundary(first);
    out.push_back(std::move(s));
  }
  return out;
}

struct GradCheckReport {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst_abs = 0.0;
  std::string worst_name;
};

// Central differences of `loss` against `analytic` for every element of
// the tensors selected by `select`. An element passes when the two agree
// within `abs_tol` or within `rel_tol` of the larger magnitude.
inline GradCheckReport check_gradient(
    StyleModel& model, const StyleParams& analytic,
    const std::function<bool(const std::string&)>& select,
    const std::function<double(const StyleModel&)>& loss, double h = 1e-6,
    double rel_tol = 1e-4, double abs_tol = 1e-6) {
  GradCheckReport report;
  auto params = model.params.tensors();
  const auto grads = analytic.tensors();
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (!select(params[t].name)) continue;
    for (Eigen::Index i = 0; i < params[t].size(); ++i) {
      double& p = params[t].data[i];
      const double saved = p;
      p = saved + h;
      const double up = loss(model);
      p = saved - h;
      const double down = loss(model);
      p = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = grads[t].data[i];
      const double err = std::abs(a - numeric);
      const bool ok = err <= abs_tol ||
                      err <= rel_tol * std::max(std::abs(a), std::abs(numeric));
      ++report.checked;
      if (!ok) ++report.failures;
      if (err > report.worst_abs) {
        report.worst_abs = err;
        report.worst_name = params[t].name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

inline bool starts_with(const std::string& s, std::string_view prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace storystyle::testing

#endif  // STORYSTYLE_TESTS_TEST_SUPPORT_H_
