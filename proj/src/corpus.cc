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

#include "storystyle/corpus.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "storystyle/error.h"
#include "storystyle/text_util.h"

namespace storystyle {
namespace {

constexpr std::string_view kSampleRateKey = "sample_rate_hz:";

bool record_less(const UtteranceRecord& a, const UtteranceRecord& b) {
  if (a.story_id != b.story_id) return a.story_id < b.story_id;
  return a.position < b.position;
}

bool has_control_chars(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

// Empty when the record is valid on its own.
std::string record_problem(const UtteranceRecord& r) {
  if (r.id.empty()) return "empty id";
  if (r.story_id.empty()) return "empty story_id";
  if (!(r.start_s >= 0.0)) return "start_s must be >= 0";
  if (!(r.end_s > r.start_s)) {
    return "end_s must exceed start_s (got start " + format_double(r.start_s) +
           ", end " + format_double(r.end_s) + ")";
  }
  if (trim(r.text).empty()) return "empty text";
  if (r.audio_path.empty()) return "empty audio_path";
  if (has_control_chars(r.id) || has_control_chars(r.story_id) ||
      has_control_chars(r.audio_path) || has_control_chars(r.text)) {
    return "fields may not contain tabs or newlines";
  }
  return {};
}

// Cross-record checks. `where` maps a record index to a location string.
template <typename Where>
void check_collection(const std::vector<UtteranceRecord>& records,
                      Where&& where) {
  std::map<std::string_view, std::size_t> ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = ids.emplace(records[i].id, i);
    if (!inserted) {
      throw ValidationError(where(i) + ": duplicate id '" + records[i].id +
                            "' (first seen at " + where(it->second) + ")");
    }
  }
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& prev = records[i - 1];
    const auto& cur = records[i];
    if (prev.story_id != cur.story_id) continue;
    if (prev.position == cur.position) {
      throw ValidationError(where(i) + ": duplicate (story_id, position) ('" +
                            cur.story_id + "', " +
                            std::to_string(cur.position) + ") also at " +
                            where(i - 1));
    }
    if (cur.start_s < prev.start_s) {
      throw ValidationError(where(i) + ": non-monotonic timing in story '" +
                            cur.story_id + "': start " +
                            format_double(cur.start_s) + " precedes start " +
                            format_double(prev.start_s) + " of position " +
                            std::to_string(prev.position));
    }
  }
}

}  // namespace

std::filesystem::path CorpusManifest::resolve_audio(
    const UtteranceRecord& record) const {
  std::filesystem::path p(record.audio_path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

const UtteranceRecord* CorpusManifest::find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

CorpusManifest parse_manifest(std::string_view text, std::string_view source) {
  const std::string src(source);
  CorpusManifest manifest;
  std::vector<std::pair<UtteranceRecord, std::size_t>> rows;

  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (trim(line).empty()) continue;
    if (line.front() == '#') {
      auto body = trim(line.substr(1));
      if (body.starts_with(kSampleRateKey)) {
        auto rate = parse_int(body.substr(kSampleRateKey.size()));
        if (!rate || *rate <= 0) {
          throw ParseError(src, line_no, "invalid sample_rate_hz");
        }
        manifest.sample_rate_hz = static_cast<int>(*rate);
      }
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() != 7) {
      throw ParseError(src, line_no,
                       "expected 7 tab-separated fields, found " +
                           std::to_string(fields.size()));
    }
    UtteranceRecord r;
    r.id = std::string(trim(fields[0]));
    r.story_id = std::string(trim(fields[1]));
    auto position = parse_int(fields[2]);
    if (!position) throw ParseError(src, line_no, "invalid position");
    r.position = *position;
    auto start = parse_double(fields[3]);
    if (!start) throw ParseError(src, line_no, "invalid start_s");
    auto end = parse_double(fields[4]);
    if (!end) throw ParseError(src, line_no, "invalid end_s");
    r.start_s = *start;
    r.end_s = *end;
    r.audio_path = std::string(trim(fields[5]));
    r.text = std::string(trim(fields[6]));
    if (auto problem = record_problem(r); !problem.empty()) {
      throw ParseError(src, line_no, problem);
    }
    rows.emplace_back(std::move(r), line_no);
  }

  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return record_less(a.first, b.first);
  });
  std::vector<UtteranceRecord> records;
  records.reserve(rows.size());
  for (auto& row : rows) records.push_back(row.first);
  check_collection(records, [&](std::size_t idx) {
    return src + ":" + std::to_string(rows[idx].second);
  });
  manifest.records = std::move(records);
  return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  auto manifest = parse_manifest(read_text_file(path), path.string());
  manifest.base_dir = path.parent_path();
  return manifest;
}

std::string serialize_manifest(const CorpusManifest& manifest) {
  std::ostringstream out;
  out << "# id\tstory_id\tposition\tstart_s\tend_s\taudio_path\ttext\n";
  out << "# sample_rate_hz: " << manifest.sample_rate_hz << "\n";
  for (const auto& r : manifest.records) {
    out << r.id << '\t' << r.story_id << '\t' << r.position << '\t'
        << format_double(r.start_s) << '\t' << format_double(r.end_s) << '\t'
        << r.audio_path << '\t' << r.text << '\n';
  }
  return out.str();
}

void validate_manifest(const CorpusManifest& manifest) {
  if (manifest.sample_rate_hz <= 0) {
    throw ValidationError("sample_rate_hz must be positive");
  }
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    if (auto problem = record_problem(manifest.records[i]); !problem.empty()) {
      throw ValidationError("record " + std::to_string(i) + ": " + problem);
    }
    if (i > 0 && record_less(manifest.records[i], manifest.records[i - 1])) {
      throw ValidationError("record " + std::to_string(i) +
                            ": records not sorted by (story_id, position)");
    }
  }
  check_collection(manifest.records, [](std::size_t idx) {
    return "record " + std::to_string(idx);
  });
}

std::vector<StorySpan> story_spans(const CorpusManifest& manifest) {
  std::vector<StorySpan> spans;
  const auto& rs = manifest.records;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= rs.size(); ++i) {
    if (i == rs.size() || rs[i].story_id != rs[begin].story_id) {
      spans.push_back({begin, i});
      begin = i;
    }
  }
  return spans;
}

std::vector<double> group_durations(const CorpusManifest& manifest,
                                    int group_size) {
  if (group_size < 1) throw ValidationError("group_size must be >= 1");
  const auto g = static_cast<std::size_t>(group_size);
  std::vector<double> durations;
  for (const auto& span : story_spans(manifest)) {
    if (span.end - span.begin < g) continue;
    for (std::size_t i = span.begin; i + g <= span.end; ++i) {
      durations.push_back(manifest.records[i + g - 1].end_s -
                          manifest.records[i].start_s);
    }
  }
  return durations;
}

LengthStats compute_length_stats(const CorpusManifest& manifest,
                                 int group_size) {
  if (manifest.records.empty()) {
    throw ValidationError("cannot compute length statistics of an empty manifest");
  }
  const auto durations = group_durations(manifest, group_size);
  if (durations.empty()) {
    throw ValidationError("no story has " + std::to_string(group_size) +
                          " consecutive sentences");
  }
  LengthStats stats;
  stats.count = static_cast<std::int64_t>(durations.size());
  const auto [lo, hi] = std::minmax_element(durations.begin(), durations.end());
  stats.min_s = *lo;
  stats.max_s = *hi;
  stats.mean_s = std::accumulate(durations.begin(), durations.end(), 0.0) /
                 static_cast<double>(durations.size());
  // Rounding can push the mean a ulp outside [min, max] when all equal.
  stats.mean_s = std::clamp(stats.mean_s, stats.min_s, stats.max_s);
  return stats;
}

PauseExtraction extract_pauses(const CorpusManifest& manifest) {
  PauseExtraction result;
  for (const auto& span : story_spans(manifest)) {
    for (std::size_t i = span.begin; i + 1 < span.end; ++i) {
      const double gap =
          manifest.records[i + 1].start_s - manifest.records[i].end_s;
      if (gap < 0.0) {
        ++result.n_clamped;
        result.pauses.push_back(0.0);
      } else {
        result.pauses.push_back(gap);
      }
    }
  }
  return result;
}

PauseDistribution fit_pause_distribution(std::span<const double> pauses,
                                         double cutoff_s) {
  if (!(cutoff_s > 0.0) || !std::isfinite(cutoff_s)) {
    throw ValidationError("pause cutoff must be positive and finite");
  }
  std::vector<double> kept;
  kept.reserve(pauses.size());
  std::int64_t excluded = 0;
  for (double p : pauses) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ValidationError("pause durations must be finite and >= 0, got " +
                            format_double(p));
    }
    if (p > cutoff_s) {
      ++excluded;
    } else {
      kept.push_back(p);
    }
  }
  if (kept.size() < 2) {
    throw ValidationError("pause fit needs at least 2 values within the " +
                          format_double(cutoff_s) + " s cutoff, found " +
                          std::to_string(kept.size()));
  }
  // Fixed summation order makes the fit independent of input order.
  std::sort(kept.begin(), kept.end());
  const double n = static_cast<double>(kept.size());
  double sum = 0.0;
  for (double p : kept) sum += p;
  const double mean = sum / n;
  double ss = 0.0;
  for (double p : kept) ss += (p - mean) * (p - mean);

  PauseDistribution dist;
  dist.mean_s = mean;
  dist.std_s = std::sqrt(ss / (n - 1.0));
  dist.cutoff_s = cutoff_s;
  dist.n_samples = static_cast<std::int64_t>(kept.size());
  dist.n_excluded = excluded;
  if (!(dist.mean_s < cutoff_s)) {
    throw ValidationError("degenerate pause fit: every kept pause equals the cutoff");
  }
  return dist;
}

}  // namespace storystyle
