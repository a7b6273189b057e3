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

#include "storystyle/alignment.h"

#include <string>
#include <vector>

#include "doctest.h"
#include "storystyle/error.h"
#include "test_support.h"

namespace ss = storystyle;

namespace {

const char* kTwoWords = R"(File type = "ooTextFile"
Object class = "TextGrid"

xmin = 0
xmax = 1.5
tiers? <exists>
size = 2
item []:
    item [1]:
        class = "IntervalTier"
        name = "words"
        xmin = 0
        xmax = 1.5
        intervals: size = 4
        intervals [1]:
            xmin = 0
            xmax = 0.2
            text = ""
        intervals [2]:
            xmin = 0.2
            xmax = 0.6
            text = "hello"
        intervals [3]:
            xmin = 0.6
            xmax = 1.1
            text = "world"
        intervals [4]:
            xmin = 1.1
            xmax = 1.5
            text = "sil"
    item [2]:
        class = "IntervalTier"
        name = "phones"
        xmin = 0
        xmax = 1.5
        intervals: size = 1
        intervals [1]:
            xmin = 0
            xmax = 1.5
            text = "HH"
)";

ss::WordInterval word(std::string w, double a, double b) {
  return {std::move(w), a, b, false};
}
ss::WordInterval gap(double a, double b) { return {"", a, b, true}; }

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("two-word grid yields the words and surrounding silences") {
  const auto iv = ss::parse_textgrid(kTwoWords);
  REQUIRE(iv.size() == 4);
  CHECK(iv[0] == gap(0.0, 0.2));
  CHECK(iv[1] == word("hello", 0.2, 0.6));
  CHECK(iv[2] == word("world", 0.6, 1.1));
  CHECK(iv[3].silence);
  CHECK(iv[3].start_s == 1.1);
}

TEST_CASE("silence labels") {
  for (const char* s : {"", "sil", "SP", "<eps>", "<SIL>"}) CHECK(ss::is_silence_label(s));
  for (const char* s : {"silly", "a", "spa"}) CHECK_FALSE(ss::is_silence_label(s));
}

TEST_CASE("malformed grids") {
  CHECK_THROWS_AS(ss::parse_textgrid(replace_once(kTwoWords, "xmax = 0.6", "xmax = 0.7")),
                  ss::ValidationError);
  CHECK_THROWS_AS(ss::parse_textgrid(replace_once(kTwoWords, "xmax = 1.1", "xmax = 0.5")),
                  ss::ValidationError);
  std::string no_words = replace_once(kTwoWords, "name = \"words\"", "name = \"tones\"");
  CHECK_THROWS_WITH_AS(ss::parse_textgrid(no_words), doctest::Contains("word tier"),
                       ss::ValidationError);
  CHECK_THROWS_AS(ss::parse_textgrid(replace_once(kTwoWords, "text = \"hello\"", "")),
                  ss::ParseError);
  CHECK_THROWS_AS(ss::load_textgrid("/nonexistent/x.TextGrid"), ss::MissingInputError);
}

TEST_CASE("a tier named with 'word' is accepted") {
  const auto iv = ss::parse_textgrid(
      replace_once(kTwoWords, "name = \"words\"", "name = \"speaker - word\""));
  CHECK(iv.size() == 4);
}

TEST_CASE("serialize then parse is the identity") {
  CHECK(ss::parse_textgrid(ss::serialize_textgrid(ss::parse_textgrid(kTwoWords))) ==
        ss::parse_textgrid(kTwoWords));
  ss::Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ss::WordInterval> iv;
    double t = 0.0;
    const int n = 1 + static_cast<int>(rng.uniform_index(12));
    for (int k = 0; k < n; ++k) {
      const double next = t + 0.01 + rng.uniform();
      if (rng.bernoulli(0.3)) {
        iv.push_back(gap(t, next));
      } else {
        iv.push_back(word("w" + std::to_string(k), t, next));
      }
      t = next;
    }
    CHECK(ss::parse_textgrid(ss::serialize_textgrid(iv)) == iv);
  }
}

TEST_CASE("pause between sentence words") {
  const std::vector<ss::WordInterval> iv{gap(0, 1), word("a", 1, 2), word("b", 2, 3.10),
                                         gap(3.10, 3.62), word("c", 3.62, 4)};
  const auto p = ss::measure_intersentence_pause(iv, 2);
  CHECK(p.pause_s == doctest::Approx(0.52).epsilon(1e-12));
  CHECK_FALSE(p.clamped);

  const auto touching = ss::measure_intersentence_pause(iv, 1);
  CHECK(touching.pause_s == 0.0);
  CHECK_FALSE(touching.clamped);

  CHECK_THROWS_AS(ss::measure_intersentence_pause(iv, 3), ss::ValidationError);
  CHECK_THROWS_AS(ss::measure_intersentence_pause(iv, 0), ss::ValidationError);
}

TEST_CASE("negative gaps clamp with a flag") {
  const std::vector<ss::WordInterval> iv{word("a", 0, 1.0), word("b", 0.9, 1.5)};
  const auto p = ss::measure_intersentence_pause(iv, 1);
  CHECK(p.pause_s == 0.0);
  CHECK(p.clamped);
}

TEST_CASE("bundled alignment gives the hand-measured gap") {
  // utt01 ends with "dawn" at 1.25 s; utt02 opens with "gulls" at 1.70 s.
  const auto iv = ss::load_textgrid(std::filesystem::path(STORYSTYLE_FIXTURE_DIR) /
                                    "alignments/system/utt01.TextGrid");
  const auto k = ss::count_alignable_words("The boat left the harbor at dawn.");
  CHECK(k == 7);
  CHECK(std::abs(ss::measure_intersentence_pause(iv, k).pause_s - 0.45) <= 1e-12);
}

TEST_CASE("alignable word count") {
  CHECK(ss::count_alignable_words("Hello,  world!  -- ok") == 3);
  CHECK(ss::count_alignable_words("  ... ") == 0);
  CHECK(ss::count_alignable_words("It's 3 o'clock.") == 3);
}
