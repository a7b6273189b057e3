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

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

#include "storystyle/error.h"
#include "storystyle/text_util.h"

namespace storystyle {
namespace {

struct Tier {
  std::string cls;
  std::string name;
  std::vector<WordInterval> intervals;
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Praat string literal: surrounding quotes, embedded quotes doubled.
std::optional<std::string> unquote(std::string_view v) {
  v = trim(v);
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') return std::nullopt;
  v = v.substr(1, v.size() - 2);
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(v[i]);
    if (v[i] == '"' && i + 1 < v.size() && v[i + 1] == '"') ++i;
  }
  return out;
}

std::string quote(std::string_view v) {
  std::string out = "\"";
  for (char c : v) {
    out.push_back(c);
    if (c == '"') out.push_back('"');
  }
  out.push_back('"');
  return out;
}

}  // namespace

bool is_silence_label(std::string_view text) {
  const auto t = lower(trim(text));
  return t.empty() || t == "sil" || t == "sp" || t == "<eps>" || t == "<sil>";
}

std::vector<WordInterval> parse_textgrid(std::string_view text,
                                         std::string_view source) {
  const std::string src(source);
  const auto lines = split_lines(text);
  std::vector<Tier> tiers;
  bool in_interval = false;
  // Fields of the interval being read: xmin, xmax, text.
  int seen = 0;
  std::size_t interval_line = 0;

  auto finish_interval = [&](std::size_t line_no) {
    if (!in_interval) return;
    if (seen != 0b111) {
      throw ParseError(src, interval_line,
                       "interval missing xmin, xmax or text");
    }
    in_interval = false;
    (void)line_no;
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (line.starts_with("item [") && line.ends_with(":") && line != "item []:") {
      finish_interval(line_no);
      tiers.emplace_back();
      continue;
    }
    if (line.starts_with("intervals [")) {
      finish_interval(line_no);
      if (tiers.empty()) throw ParseError(src, line_no, "interval outside a tier");
      tiers.back().intervals.emplace_back();
      in_interval = true;
      seen = 0;
      interval_line = line_no;
      continue;
    }
    if (line.starts_with("points [")) {
      finish_interval(line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (tiers.empty()) continue;  // file header
    Tier& tier = tiers.back();
    if (in_interval) {
      WordInterval& iv = tier.intervals.back();
      if (key == "xmin" || key == "xmax") {
        auto v = parse_double(value);
        if (!v) throw ParseError(src, line_no, "invalid " + std::string(key));
        (key == "xmin" ? iv.start_s : iv.end_s) = *v;
        seen |= key == "xmin" ? 0b001 : 0b010;
      } else if (key == "text") {
        auto v = unquote(value);
        if (!v) throw ParseError(src, line_no, "unterminated text literal");
        iv.word = *v;
        iv.silence = is_silence_label(iv.word);
        seen |= 0b100;
      }
    } else if (key == "class") {
      tier.cls = unquote(value).value_or("");
    } else if (key == "name") {
      tier.name = unquote(value).value_or("");
    }
  }
  finish_interval(lines.size());

  const Tier* words = nullptr;
  for (const auto& t : tiers) {
    if (t.cls == "IntervalTier" && lower(t.name) == "words") {
      words = &t;
      break;
    }
  }
  if (!words) {
    for (const auto& t : tiers) {
      if (t.cls == "IntervalTier" &&
          lower(t.name).find("word") != std::string::npos) {
        words = &t;
        break;
      }
    }
  }
  if (!words) throw ValidationError(src + ": no word tier");

  constexpr double kSlack = 1e-9;
  const auto& ivs = words->intervals;
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    if (!(ivs[i].end_s >= ivs[i].start_s)) {
      throw ValidationError(src + ": interval " + std::to_string(i + 1) +
                            " ends before it starts");
    }
    if (i > 0 && ivs[i].start_s < ivs[i - 1].end_s - kSlack) {
      throw ValidationError(src + ": interval " + std::to_string(i + 1) +
                            " overlaps interval " + std::to_string(i));
    }
  }
  return ivs;
}

std::vector<WordInterval> load_textgrid(const std::filesystem::path& path) {
  return parse_textgrid(read_text_file(path), path.string());
}

std::string serialize_textgrid(std::span<const WordInterval> intervals) {
  const double xmin = intervals.empty() ? 0.0 : intervals.front().start_s;
  const double xmax = intervals.empty() ? 0.0 : intervals.back().end_s;
  std::ostringstream out;
  out << "File type = \"ooTextFile\"\n"
      << "Object class = \"TextGrid\"\n\n"
      << "xmin = " << format_double(xmin) << "\n"
      << "xmax = " << format_double(xmax) << "\n"
      << "tiers? <exists>\n"
      << "size = 1\n"
      << "item []:\n"
      << "    item [1]:\n"
      << "        class = \"IntervalTier\"\n"
      << "        name = \"words\"\n"
      << "        xmin = " << format_double(xmin) << "\n"
      << "        xmax = " << format_double(xmax) << "\n"
      << "        intervals: size = " << intervals.size() << "\n";
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    out << "        intervals [" << i + 1 << "]:\n"
        << "            xmin = " << format_double(intervals[i].start_s) << "\n"
        << "            xmax = " << format_double(intervals[i].end_s) << "\n"
        << "            text = " << quote(intervals[i].word) << "\n";
  }
  return out.str();
}

PauseMeasurement measure_intersentence_pause(
    std::span<const WordInterval> intervals,
    std::size_t first_sentence_word_count) {
  if (first_sentence_word_count < 1) {
    throw ValidationError("first sentence must hold at least one word");
  }
  std::vector<const WordInterval*> words;
  for (const auto& iv : intervals) {
    if (!iv.silence) words.push_back(&iv);
  }
  if (words.size() < first_sentence_word_count + 1) {
    throw ValidationError("alignment holds " + std::to_string(words.size()) +
                          " words; need at least " +
                          std::to_string(first_sentence_word_count + 1));
  }
  const double gap = words[first_sentence_word_count]->start_s -
                     words[first_sentence_word_count - 1]->end_s;
  if (gap < 0.0) return {0.0, true};
  return {gap, false};
}

std::size_t count_alignable_words(std::string_view sentence) {
  std::size_t n = 0;
  for (auto token : split_ws(sentence)) {
    if (std::any_of(token.begin(), token.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) != 0;
        })) {
      ++n;
    }
  }
  return n;
}

}  // namespace storystyle
