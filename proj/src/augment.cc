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

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "storystyle/error.h"
#include "storystyle/text_util.h"

namespace storystyle {
namespace {

Waveform read_page(const CorpusManifest& manifest,
                   const std::filesystem::path& path) {
  Waveform page = read_wav(path);
  if (page.sample_rate_hz != manifest.sample_rate_hz) {
    throw ValidationError(path.string() + ": sample rate " +
                          std::to_string(page.sample_rate_hz) +
                          " Hz differs from manifest rate " +
                          std::to_string(manifest.sample_rate_hz) + " Hz");
  }
  return page;
}

}  // namespace

std::string_view to_string(PairingMode mode) {
  return mode == PairingMode::kConsecutive ? "consecutive" : "emotion";
}

std::optional<PairingMode> parse_pairing_mode(std::string_view name) {
  if (name == "consecutive") return PairingMode::kConsecutive;
  if (name == "emotion" || name == "emotion_matched") {
    return PairingMode::kEmotionMatched;
  }
  return std::nullopt;
}

std::vector<PairCandidate> build_pairs(const CorpusManifest& manifest,
                                       const LabelMap& labels,
                                       const PairingPolicy& policy) {
  std::vector<PairCandidate> pairs;
  if (policy.mode == PairingMode::kConsecutive) {
    for (const auto& span : story_spans(manifest)) {
      for (std::size_t i = span.begin; i + 1 < span.end; ++i) {
        pairs.push_back({manifest.records[i].id, manifest.records[i + 1].id,
                         std::nullopt});
      }
    }
    return pairs;
  }

  if (policy.max_pairs_per_utterance < 1) {
    throw ValidationError("max_pairs_per_utterance must be >= 1");
  }
  // Bucket key: (story or "" when crossing stories, emotion).
  std::map<std::pair<std::string, Emotion>, std::vector<std::string>> buckets;
  for (const auto& r : manifest.records) {
    auto it = labels.find(r.id);
    if (it == labels.end()) {
      throw MissingInputError("no emotion label for utterance '" + r.id + "'");
    }
    const Emotion e = it->second.effective_category;
    if (e == Emotion::kNeutral && !policy.include_neutral) continue;
    buckets[{policy.cross_story ? std::string() : r.story_id, e}].push_back(r.id);
  }
  bool any_pairable = false;
  for (const auto& [key, members] : buckets) {
    if (members.size() >= 2) any_pairable = true;
  }
  if (!any_pairable) {
    throw ValidationError(
        "no emotion bucket holds two or more utterances; nothing to pair");
  }

  Rng rng(policy.seed);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [key, members] : buckets) {
    if (members.size() < 2) continue;
    for (int round = 0; round < policy.max_pairs_per_utterance; ++round) {
      auto order = members;
      rng.shuffle(order);
      for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
        if (!seen.emplace(order[i], order[i + 1]).second) continue;
        pairs.push_back({order[i], order[i + 1], key.second});
      }
    }
  }
  return pairs;
}

double sample_pause(const PauseDistribution& dist, Rng& rng) {
  if (!(dist.std_s >= 0.0) || !(dist.mean_s >= 0.0) ||
      !(dist.mean_s <= dist.cutoff_s)) {
    throw ValidationError("invalid pause distribution");
  }
  if (dist.std_s == 0.0) return dist.mean_s;
  while (true) {
    const double x = rng.normal(dist.mean_s, dist.std_s);
    if (x >= 0.0 && x <= dist.cutoff_s) return x;
  }
}

Waveform render_pair(const Waveform& first, const Waveform& second,
                     double pause_s, int sample_rate_hz) {
  if (first.sample_rate_hz != sample_rate_hz ||
      second.sample_rate_hz != sample_rate_hz) {
    throw ValidationError("sample rate mismatch: " +
                          std::to_string(first.sample_rate_hz) + " / " +
                          std::to_string(second.sample_rate_hz) +
                          " Hz against " + std::to_string(sample_rate_hz) +
                          " Hz");
  }
  if (first.samples.empty() || second.samples.empty()) {
    throw ValidationError("cannot render a pair from an empty waveform");
  }
  if (!(pause_s >= 0.0) || !std::isfinite(pause_s)) {
    throw ValidationError("pause must be finite and >= 0");
  }
  const auto gap = static_cast<std::size_t>(
      std::llround(pause_s * static_cast<double>(sample_rate_hz)));
  Waveform out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.reserve(first.samples.size() + gap + second.samples.size());
  out.samples.insert(out.samples.end(), first.samples.begin(),
                     first.samples.end());
  out.samples.insert(out.samples.end(), gap, std::int16_t{0});
  out.samples.insert(out.samples.end(), second.samples.begin(),
                     second.samples.end());
  return out;
}

std::string terminate_text(std::string_view text) {
  std::string_view body = trim(text);
  if (!body.empty() && body.back() == kTextTerminator) {
    body.remove_suffix(1);
    body = trim(body);
  }
  if (body.empty()) throw ValidationError("cannot terminate empty text");
  if (body.find(kTextTerminator) != std::string_view::npos) {
    throw ValidationError("text contains the reserved terminator '~': " +
                          std::string(body));
  }
  std::string out(body);
  out.push_back(kTextTerminator);
  return out;
}

std::string join_texts(std::string_view first, std::string_view second) {
  // Strip the terminator off the first sentence before joining.
  std::string head = terminate_text(first);
  head.pop_back();
  std::string tail = terminate_text(second);
  tail.pop_back();
  return terminate_text(head + " " + tail);
}

std::vector<AugmentedPair> plan_augmented_pairs(
    const CorpusManifest& manifest, std::span<const PairCandidate> candidates,
    const PauseDistribution& dist, Rng& rng) {
  std::vector<AugmentedPair> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.first_id == c.second_id) {
      throw ValidationError("self-pair for utterance '" + c.first_id + "'");
    }
    const auto* first = manifest.find(c.first_id);
    const auto* second = manifest.find(c.second_id);
    if (!first || !second) {
      throw MissingInputError("pair references unknown utterance '" +
                              (first ? c.second_id : c.first_id) + "'");
    }
    char id[32];
    std::snprintf(id, sizeof(id), "aug_%05zu", i);
    AugmentedPair p;
    p.pair_id = id;
    p.first_id = c.first_id;
    p.second_id = c.second_id;
    p.emotion = c.emotion;
    p.pause_s = sample_pause(dist, rng);
    p.joined_text = join_texts(first->text, second->text);
    p.audio_path = "wav/" + p.pair_id + ".wav";
    out.push_back(std::move(p));
  }
  return out;
}

Waveform load_utterance_audio(const CorpusManifest& manifest,
                              const UtteranceRecord& record) {
  const auto path = manifest.resolve_audio(record);
  Waveform wave =
      slice_seconds(read_page(manifest, path), record.start_s, record.end_s);
  if (wave.samples.empty()) {
    throw ValidationError("utterance '" + record.id + "' lies outside " +
                          path.string());
  }
  return wave;
}

std::string serialize_pair_metadata(std::span<const AugmentedPair> pairs) {
  std::ostringstream out;
  out << "# pair_id\tfirst_id\tsecond_id\temotion\tpause_s\n";
  for (const auto& p : pairs) {
    out << p.pair_id << '\t' << p.first_id << '\t' << p.second_id << '\t'
        << (p.emotion ? to_string(*p.emotion) : std::string_view("-")) << '\t'
        << format_double(p.pause_s) << '\n';
  }
  return out.str();
}

std::vector<PairMetadata> parse_pair_metadata(std::string_view text,
                                              std::string_view source) {
  const std::string src(source);
  std::vector<PairMetadata> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() != 5) {
      throw ParseError(src, i + 1, "expected 5 tab-separated fields");
    }
    PairMetadata m;
    m.pair_id = std::string(f[0]);
    m.first_id = std::string(f[1]);
    m.second_id = std::string(f[2]);
    if (f[3] != "-") {
      auto e = parse_emotion(f[3]);
      if (!e) throw ParseError(src, i + 1, "unknown emotion '" + std::string(f[3]) + "'");
      m.emotion = *e;
    }
    auto pause = parse_double(f[4]);
    if (!pause || *pause < 0.0) throw ParseError(src, i + 1, "invalid pause_s");
    m.pause_s = *pause;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<PairMetadata> load_pair_metadata(const std::filesystem::path& path) {
  return parse_pair_metadata(read_text_file(path), path.string());
}

AugmentedOutput emit_augmented_manifest(const CorpusManifest& source,
                                        std::span<const AugmentedPair> pairs,
                                        const std::filesystem::path& out_dir) {
  std::set<std::string> ids, paths;
  for (const auto& p : pairs) {
    if (!ids.insert(p.pair_id).second) {
      throw ValidationError("duplicate pair id '" + p.pair_id + "'");
    }
    if (!paths.insert(p.audio_path).second) {
      throw ValidationError("output path collision at '" + p.audio_path + "'");
    }
  }

  // Page recordings are shared by many sentences; read each once.
  std::map<std::filesystem::path, Waveform> pages;
  auto utterance_audio = [&](const std::string& id) {
    const auto* rec = source.find(id);
    if (!rec) throw MissingInputError("unknown utterance '" + id + "'");
    const auto path = source.resolve_audio(*rec);
    auto it = pages.find(path);
    if (it == pages.end()) {
      it = pages.emplace(path, read_page(source, path)).first;
    }
    return slice_seconds(it->second, rec->start_s, rec->end_s);
  };

  CorpusManifest out;
  out.sample_rate_hz = source.sample_rate_hz;
  out.base_dir = out_dir;
  for (const auto& p : pairs) {
    const Waveform joined =
        render_pair(utterance_audio(p.first_id), utterance_audio(p.second_id),
                    p.pause_s, source.sample_rate_hz);
    write_wav(out_dir / p.audio_path, joined);
    UtteranceRecord r;
    r.id = p.pair_id;
    r.story_id = p.pair_id;
    r.position = 0;
    r.start_s = 0.0;
    r.end_s = joined.duration_s();
    r.audio_path = p.audio_path;
    r.text = p.joined_text;
    out.records.push_back(std::move(r));
  }

  AugmentedOutput result;
  result.manifest_path = out_dir / kAugmentedManifestName;
  result.metadata_path = out_dir / kPairMetadataName;
  write_text_file(result.manifest_path, serialize_manifest(out));
  write_text_file(result.metadata_path, serialize_pair_metadata(pairs));
  return result;
}

std::vector<std::string> audit_emotion_consistency(
    std::span<const PairMetadata> pairs, const LabelMap& labels) {
  std::vector<std::string> problems;
  for (const auto& p : pairs) {
    if (!p.emotion) continue;
    for (const auto& id : {p.first_id, p.second_id}) {
      auto it = labels.find(id);
      if (it == labels.end()) {
        problems.push_back(p.pair_id + ": no label for '" + id + "'");
      } else if (it->second.effective_category != *p.emotion) {
        problems.push_back(p.pair_id + ": '" + id + "' is " +
                           std::string(to_string(it->second.effective_category)) +
                           ", pair is " + std::string(to_string(*p.emotion)));
      }
    }
  }
  return problems;
}

std::vector<std::string> audit_terminators(const CorpusManifest& manifest) {
  std::vector<std::string> problems;
  for (const auto& r : manifest.records) {
    const auto pos = r.text.find(kTextTerminator);
    if (pos != r.text.size() - 1) {
      problems.push_back(r.id + ": terminator misplaced in '" + r.text + "'");
    }
  }
  return problems;
}

}  // namespace storystyle
