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

#include "storystyle/augment.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "storystyle/error.h"
#include "storystyle/text_util.h"
#include "oracles.h"
#include "test_support.h"

namespace ss = storystyle;
using ss::Emotion;
using ss::PairingMode;

namespace {

ss::LabelRecord lab(const std::string& id, Emotion e) { return {id, e, 0.9, e}; }

ss::CorpusManifest three_sentence_story() {
  ss::CorpusManifest m;
  for (int i = 0; i < 3; ++i) {
    m.records.push_back({"s" + std::to_string(i + 1), "story", i, i * 2.0, i * 2.0 + 1.5, "p.wav",
                         "Sentence " + std::to_string(i + 1) + "."});
  }
  return m;
}

ss::Waveform noise(ss::Rng& rng, std::size_t n, int sr) {
  ss::Waveform w;
  w.sample_rate_hz = sr;
  for (std::size_t i = 0; i < n; ++i) {
    w.samples.push_back(static_cast<std::int16_t>(rng.uniform_index(65536) - 32768));
  }
  return w;
}

// One story page on disk with `n` utterances of 0.5 s separated by 0.25 s.
ss::CorpusManifest disk_corpus(const std::filesystem::path& dir, int n, int sr, ss::Rng& rng) {
  ss::CorpusManifest m;
  m.sample_rate_hz = sr;
  m.base_dir = dir;
  const auto page = noise(rng, static_cast<std::size_t>(sr * (0.75 * n + 0.5)), sr);
  ss::write_wav(dir / "page.wav", page);
  for (int i = 0; i < n; ++i) {
    m.records.push_back({"u" + std::to_string(i), "story", i, 0.25 + 0.75 * i, 0.75 + 0.75 * i,
                         "page.wav", "Utterance number " + std::to_string(i) + "."});
  }
  ss::write_text_file(dir / "manifest.tsv", ss::serialize_manifest(m));
  return ss::load_manifest(dir / "manifest.tsv");
}

ss::PauseDistribution storytelling_pause_fit() {
  ss::PauseDistribution d;
  d.mean_s = 0.509;
  d.std_s = 0.223;
  d.cutoff_s = 1.0;
  d.n_samples = 100;
  return d;
}

}  // namespace

TEST_CASE("consecutive pairs of a three-sentence story") {
  ss::PairingPolicy policy;
  policy.mode = PairingMode::kConsecutive;
  const auto pairs = ss::build_pairs(three_sentence_story(), {}, policy);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == ss::PairCandidate{"s1", "s2", std::nullopt});
  CHECK(pairs[1] == ss::PairCandidate{"s2", "s3", std::nullopt});
}

TEST_CASE("a two-member bucket pairs its members, never with themselves") {
  ss::CorpusManifest m;
  m.records = {{"a", "st", 0, 0, 1, "p.wav", "A."}, {"b", "st", 1, 2, 3, "p.wav", "B."},
               {"c", "st", 2, 4, 5, "p.wav", "C."}};
  ss::LabelMap labels{{"a", lab("a", Emotion::kJoy)}, {"b", lab("b", Emotion::kJoy)},
                      {"c", lab("c", Emotion::kFear)}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ss::PairingPolicy policy;
    policy.seed = seed;
    const auto pairs = ss::build_pairs(m, labels, policy);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].emotion == Emotion::kJoy);
    const bool ab = pairs[0].first_id == "a" && pairs[0].second_id == "b";
    const bool ba = pairs[0].first_id == "b" && pairs[0].second_id == "a";
    CHECK((ab || ba));
  }
}

TEST_CASE("emotion pairing invariants on a 100-utterance corpus") {
  ss::Rng rng(8);
  const auto m = ss::testing::random_manifest(rng, 5, 30);
  const auto labels = ss::testing::random_labels(m, rng, 0.3);
  for (bool include_neutral : {true, false}) {
    for (int max_pairs : {1, 2, 3}) {
      ss::PairingPolicy policy;
      policy.seed = 99;
      policy.include_neutral = include_neutral;
      policy.max_pairs_per_utterance = max_pairs;
      const auto pairs = ss::build_pairs(m, labels, policy);
      CHECK(pairs == ss::build_pairs(m, labels, policy));
      std::map<std::string, int> as_first;
      std::set<std::pair<std::string, std::string>> unique;
      for (const auto& p : pairs) {
        CHECK(p.first_id != p.second_id);
        const auto e1 = labels.at(p.first_id).effective_category;
        const auto e2 = labels.at(p.second_id).effective_category;
        CHECK(e1 == e2);
        CHECK(p.emotion == e1);
        CHECK(m.find(p.first_id)->story_id == m.find(p.second_id)->story_id);
        if (!include_neutral) CHECK(e1 != Emotion::kNeutral);
        CHECK(++as_first[p.first_id] <= max_pairs);
        CHECK(unique.insert({p.first_id, p.second_id}).second);
      }
    }
  }
  ss::PairingPolicy other;
  other.seed = 100;
  ss::PairingPolicy base;
  base.seed = 99;
  CHECK(ss::build_pairs(m, labels, other) != ss::build_pairs(m, labels, base));
}

TEST_CASE("pairing errors") {
  auto m = three_sentence_story();
  ss::LabelMap labels{{"s1", lab("s1", Emotion::kJoy)}, {"s2", lab("s2", Emotion::kFear)}};
  CHECK_THROWS_WITH_AS(ss::build_pairs(m, labels, {}), doctest::Contains("s3"),
                       ss::MissingInputError);
  labels["s3"] = lab("s3", Emotion::kAnger);
  CHECK_THROWS_AS(ss::build_pairs(m, labels, {}), ss::ValidationError);
}

TEST_CASE("cross-story pairing only when enabled") {
  ss::CorpusManifest m;
  m.records = {{"a", "s1", 0, 0, 1, "p.wav", "A."}, {"b", "s2", 0, 0, 1, "p.wav", "B."}};
  ss::LabelMap labels{{"a", lab("a", Emotion::kJoy)}, {"b", lab("b", Emotion::kJoy)}};
  CHECK_THROWS_AS(ss::build_pairs(m, labels, {}), ss::ValidationError);
  ss::PairingPolicy policy;
  policy.cross_story = true;
  CHECK(ss::build_pairs(m, labels, policy).size() == 1);
}

TEST_CASE("pause sampling") {
  ss::Rng rng(4);
  const auto dist = storytelling_pause_fit();
  for (int i = 0; i < 10000; ++i) {
    const double x = ss::sample_pause(dist, rng);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
  }
  auto fixed = dist;
  fixed.std_s = 0.0;
  for (int i = 0; i < 10; ++i) CHECK(ss::sample_pause(fixed, rng) == 0.509);

  ss::Rng a(12), b(12);
  for (int i = 0; i < 100; ++i) CHECK(ss::sample_pause(dist, a) == ss::sample_pause(dist, b));
}

TEST_CASE("pause sample mean matches the truncated-normal mean") {
  const auto dist = storytelling_pause_fit();
  const auto moments = ss::oracle::truncated_normal_moments(0.509, 0.223, 0.0, 1.0);
  ss::Rng rng(2024);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += ss::sample_pause(dist, rng);
  const double se = std::sqrt(moments.variance / n);
  CHECK(std::abs(sum / n - moments.mean) <= 3.0 * se);
}

TEST_CASE("render length and parent regions") {
  ss::Rng rng(1);
  const auto a = noise(rng, 22050, 22050);
  const auto b = noise(rng, 44100, 22050);
  auto out = ss::render_pair(a, b, 0.5, 22050);
  CHECK(out.samples.size() == 77175);
  CHECK(std::equal(a.samples.begin(), a.samples.end(), out.samples.begin()));
  CHECK(std::all_of(out.samples.begin() + 22050, out.samples.begin() + 33075,
                    [](std::int16_t s) { return s == 0; }));
  CHECK(std::equal(b.samples.begin(), b.samples.end(), out.samples.begin() + 33075));

  out = ss::render_pair(a, b, 0.0, 22050);
  CHECK(out.samples.size() == a.samples.size() + b.samples.size());

  auto c = b;
  c.sample_rate_hz = 16000;
  CHECK_THROWS_AS(ss::render_pair(a, c, 0.1, 22050), ss::ValidationError);
  CHECK_THROWS_AS(ss::render_pair(a, ss::Waveform{{}, 22050}, 0.1, 22050), ss::ValidationError);
  CHECK_THROWS_AS(ss::render_pair(a, b, -0.1, 22050), ss::ValidationError);
}

TEST_CASE("text joining") {
  CHECK(ss::join_texts("Hello.", "World.") == "Hello. World.~");
  CHECK(ss::join_texts("A", "B") == "A B~");
  CHECK(ss::join_texts("A~", "B~") == "A B~");
  CHECK(ss::terminate_text("Single sentence.") == "Single sentence.~");
  CHECK_THROWS_AS(ss::join_texts("", "B"), ss::ValidationError);
  CHECK_THROWS_AS(ss::join_texts("A ~ b", "B"), ss::ValidationError);

  ss::Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const auto a = ss::testing::random_sentence(rng, 1 + static_cast<int>(rng.uniform_index(6)));
    const auto b = ss::testing::random_sentence(rng, 1 + static_cast<int>(rng.uniform_index(6)));
    const auto j = ss::join_texts(a, b);
    CHECK(j == a + " " + b + "~");
    CHECK(std::count(j.begin(), j.end(), '~') == 1);
    CHECK(j.back() == '~');
  }
}

TEST_CASE("emitting an augmented corpus") {
  ss::testing::TempDir src_dir, out_a, out_b;
  ss::Rng rng(31);
  const auto m = disk_corpus(src_dir.path(), 6, 16000, rng);
  ss::PairingPolicy policy;
  policy.mode = PairingMode::kConsecutive;
  const auto candidates = ss::build_pairs(m, {}, policy);
  std::vector<ss::PairCandidate> two(candidates.begin(), candidates.begin() + 2);

  ss::Rng pause_a(5), pause_b(5);
  const auto pairs = ss::plan_augmented_pairs(m, two, storytelling_pause_fit(), pause_a);
  const auto out = ss::emit_augmented_manifest(m, pairs, out_a.path());
  const auto manifest = ss::load_manifest(out.manifest_path);
  REQUIRE(manifest.records.size() == 2);
  CHECK(std::filesystem::is_regular_file(out_a / "wav/aug_00000.wav"));
  CHECK(std::filesystem::is_regular_file(out_a / "wav/aug_00001.wav"));
  CHECK(ss::audit_terminators(manifest).empty());

  for (std::size_t k = 0; k < 2; ++k) {
    const auto wave = ss::read_wav(out_a.path() / pairs[k].audio_path);
    const auto first = ss::load_utterance_audio(m, *m.find(pairs[k].first_id));
    const auto second = ss::load_utterance_audio(m, *m.find(pairs[k].second_id));
    CHECK(wave.samples.size() ==
          first.samples.size() + static_cast<std::size_t>(std::llround(pairs[k].pause_s * 16000)) +
              second.samples.size());
    CHECK(manifest.records[k].text == pairs[k].joined_text);
    CHECK(ss::load_utterance_audio(manifest, manifest.records[k]).samples == wave.samples);
  }

  const auto meta = ss::load_pair_metadata(out.metadata_path);
  REQUIRE(meta.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(meta[k].pause_s == pairs[k].pause_s);
    CHECK(meta[k].first_id == pairs[k].first_id);
    CHECK_FALSE(meta[k].emotion);
  }

  const auto again = ss::plan_augmented_pairs(m, two, storytelling_pause_fit(), pause_b);
  const auto out2 = ss::emit_augmented_manifest(m, again, out_b.path());
  CHECK(ss::read_text_file(out2.manifest_path) == ss::read_text_file(out.manifest_path));
  CHECK(ss::read_text_file(out2.metadata_path) == ss::read_text_file(out.metadata_path));
  CHECK(ss::read_text_file(out_b / "wav/aug_00001.wav") ==
        ss::read_text_file(out_a / "wav/aug_00001.wav"));

  auto clash = pairs;
  clash[1].audio_path = clash[0].audio_path;
  CHECK_THROWS_AS(ss::emit_augmented_manifest(m, clash, out_b.path()), ss::ValidationError);
}

TEST_CASE("emotion audit flags mismatched parents") {
  ss::LabelMap labels{{"a", lab("a", Emotion::kJoy)}, {"b", lab("b", Emotion::kFear)}};
  std::vector<ss::PairMetadata> meta = {{"aug_00000", "a", "b", Emotion::kJoy, 0.5}};
  CHECK(ss::audit_emotion_consistency(meta, labels).size() == 1);
  labels["b"] = lab("b", Emotion::kJoy);
  CHECK(ss::audit_emotion_consistency(meta, labels).empty());
}

TEST_CASE("terminator audit flags interior or missing terminators") {
  ss::CorpusManifest m;
  m.records = {{"a", "s", 0, 0, 1, "p.wav", "Fine.~"}, {"b", "s", 1, 2, 3, "p.wav", "Bad ~ text.~"},
               {"c", "s", 2, 4, 5, "p.wav", "No terminator."}};
  CHECK(ss::audit_terminators(m).size() == 2);
}
