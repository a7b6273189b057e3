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
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "storystyle/error.h"
#include "test_support.h"

namespace ss = storystyle;
using ss::Emotion;

namespace {

ss::LabelRecord rec(const std::string& id, Emotion e, double score) {
  return {id, e, score, e};
}

ss::CorpusManifest story_of(int n, const std::string& story = "s") {
  ss::CorpusManifest m;
  for (int i = 0; i < n; ++i) {
    m.records.push_back({story + std::to_string(i), story, i, i * 2.0, i * 2.0 + 1.0,
                         "p.wav", "T."});
  }
  return m;
}

}  // namespace

TEST_CASE("category names round-trip over the closed set") {
  for (Emotion e : ss::kAllEmotions) CHECK(ss::parse_emotion(ss::to_string(e)) == e);
  CHECK_FALSE(ss::parse_emotion("bliss"));
  CHECK_FALSE(ss::parse_emotion("Joy"));
}

TEST_CASE("label file examples") {
  const auto labels = ss::parse_labels("u1\tjoy\t0.92\n");
  REQUIRE(labels.size() == 1);
  const auto& r = labels.at("u1");
  CHECK(r.raw_category == Emotion::kJoy);
  CHECK(r.score == 0.92);
  CHECK(r.effective_category == Emotion::kJoy);

  CHECK_THROWS_WITH_AS(ss::parse_labels("u2\tbliss\t0.5\n"), doctest::Contains("unknown emotion"),
                       ss::ParseError);
  CHECK_THROWS_WITH_AS(ss::parse_labels("u3\tfear\t1.3\n"), doctest::Contains("outside [0, 1]"),
                       ss::ParseError);
  CHECK_THROWS_WITH_AS(ss::parse_labels("u1\tjoy\t0.9\nu1\tfear\t0.8\n"),
                       doctest::Contains("duplicate"), ss::ParseError);
  CHECK_THROWS_AS(ss::parse_labels("u1\tjoy\n"), ss::ParseError);
  CHECK_THROWS_AS(ss::load_labels("/nonexistent/labels.tsv"), ss::MissingInputError);
}

TEST_CASE("threshold examples") {
  CHECK(ss::apply_threshold(rec("a", Emotion::kJoy, 0.65)).effective_category == Emotion::kNeutral);
  CHECK(ss::apply_threshold(rec("a", Emotion::kAnger, 0.90)).effective_category == Emotion::kAnger);
  CHECK(ss::apply_threshold(rec("a", Emotion::kNeutral, 0.10)).effective_category ==
        Emotion::kNeutral);
  // Ties keep the raw label.
  CHECK(ss::apply_threshold(rec("a", Emotion::kFear, 0.7)).effective_category == Emotion::kFear);
  const auto t = ss::apply_threshold(rec("a", Emotion::kJoy, 0.65));
  CHECK(t.raw_category == Emotion::kJoy);
  CHECK(t.score == 0.65);
}

TEST_CASE("thresholding is idempotent, also through the file format") {
  ss::Rng rng(3);
  ss::LabelMap labels;
  for (int i = 0; i < 200; ++i) {
    const auto id = "u" + std::to_string(i);
    labels[id] = rec(id, ss::testing::random_emotion(rng), rng.uniform());
  }
  ss::apply_threshold(labels, 0.7);
  auto twice = labels;
  ss::apply_threshold(twice, 0.7);
  auto reloaded = ss::parse_labels(ss::serialize_labels(labels));
  ss::apply_threshold(reloaded, 0.7);
  for (const auto& [id, r] : labels) {
    CHECK(twice.at(id).effective_category == r.effective_category);
    CHECK(reloaded.at(id).effective_category == r.effective_category);
  }
  CHECK(ss::serialize_labels(reloaded) == ss::serialize_labels(labels));
}

TEST_CASE("label distribution example") {
  std::vector<ss::LabelRecord> v = {rec("a", Emotion::kNeutral, 0.9), rec("b", Emotion::kNeutral, 0.9),
                                    rec("c", Emotion::kJoy, 0.9), rec("d", Emotion::kFear, 0.9)};
  const auto d = ss::label_distribution(std::span<const ss::LabelRecord>(v));
  CHECK(d.size() == 7);
  CHECK(d.at(Emotion::kNeutral) == 50.0);
  CHECK(d.at(Emotion::kJoy) == 25.0);
  CHECK(d.at(Emotion::kFear) == 25.0);
  CHECK(d.at(Emotion::kAnger) == 0.0);
  CHECK_THROWS_AS(ss::label_distribution(std::span<const ss::LabelRecord>()), ss::ValidationError);
}

TEST_CASE("label distribution matches a tally and raising the threshold never lowers neutral") {
  ss::Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ss::LabelRecord> raw;
    const int n = 1 + static_cast<int>(rng.uniform_index(300));
    for (int i = 0; i < n; ++i) raw.push_back(rec("u", ss::testing::random_emotion(rng), rng.uniform()));
    double prev_neutral = -1.0;
    for (double t : {0.0, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      std::vector<ss::LabelRecord> cur;
      for (const auto& r : raw) cur.push_back(ss::apply_threshold(r, t));
      const auto d = ss::label_distribution(std::span<const ss::LabelRecord>(cur));
      double total = 0.0;
      for (Emotion e : ss::kAllEmotions) {
        int count = 0;
        for (const auto& r : cur) count += r.effective_category == e;
        CHECK(std::abs(d.at(e) - 100.0 * count / n) <= 1e-12);
        CHECK(d.at(e) >= 0.0);
        total += d.at(e);
      }
      CHECK(std::abs(total - 100.0) <= 0.01);
      CHECK(d.at(Emotion::kNeutral) >= prev_neutral);
      prev_neutral = d.at(Emotion::kNeutral);
    }
  }
}

TEST_CASE("consecutive match rate examples") {
  auto m = story_of(4);
  ss::LabelMap labels;
  const Emotion seq[] = {Emotion::kJoy, Emotion::kJoy, Emotion::kJoy, Emotion::kFear};
  for (int i = 0; i < 4; ++i) labels["s" + std::to_string(i)] = rec("s" + std::to_string(i), seq[i], 0.9);
  // Pairs (joy, joy), (joy, joy), (joy, fear).
  CHECK(ss::consecutive_match_rate(m, labels) == doctest::Approx(2.0 / 3.0));

  // (joy, joy), (neutral, neutral), (joy, fear) across three stories.
  ss::CorpusManifest m2;
  ss::LabelMap l2;
  const std::pair<Emotion, Emotion> pairs[] = {{Emotion::kJoy, Emotion::kJoy},
                                               {Emotion::kNeutral, Emotion::kNeutral},
                                               {Emotion::kJoy, Emotion::kFear}};
  for (int p = 0; p < 3; ++p) {
    const auto story = "p" + std::to_string(p);
    auto part = story_of(2, story);
    for (auto& r : part.records) m2.records.push_back(r);
    l2[story + "0"] = rec(story + "0", pairs[p].first, 0.9);
    l2[story + "1"] = rec(story + "1", pairs[p].second, 0.9);
  }
  CHECK(ss::consecutive_match_rate(m2, l2) == doctest::Approx(1.0 / 3.0));

  for (auto& [id, r] : l2) r.effective_category = Emotion::kNeutral;
  CHECK(ss::consecutive_match_rate(m2, l2) == 0.0);

  l2.erase("p1" "0");
  CHECK_THROWS_WITH_AS(ss::consecutive_match_rate(m2, l2), doctest::Contains("p10"),
                       ss::MissingInputError);
}

TEST_CASE("consecutive match rate equals a pair scan on random corpora") {
  ss::Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = ss::testing::random_manifest(rng, 10, 8);
    const auto labels = ss::testing::random_labels(m, rng, 0.5);
    int pairs = 0, hits = 0;
    for (std::size_t i = 0; i + 1 < m.records.size(); ++i) {
      if (m.records[i].story_id != m.records[i + 1].story_id) continue;
      ++pairs;
      const auto a = labels.at(m.records[i].id).effective_category;
      const auto b = labels.at(m.records[i + 1].id).effective_category;
      hits += a == b && a != Emotion::kNeutral;
    }
    const double expected = pairs ? static_cast<double>(hits) / pairs : 0.0;
    const double rate = ss::consecutive_match_rate(m, labels);
    CHECK(std::abs(rate - expected) <= 1e-12);
    CHECK(rate >= 0.0);
    CHECK(rate <= 1.0);
  }
}
