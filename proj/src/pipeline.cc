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

#include "storystyle/pipeline.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "storystyle/alignment.h"
#include "storystyle/classifier_client.h"
#include "storystyle/corpus.h"
#include "storystyle/emotion.h"
#include "storystyle/error.h"
#include "storystyle/mel.h"
#include "storystyle/metrics.h"
#include "storystyle/probe.h"
#include "storystyle/rng.h"
#include "storystyle/text_util.h"
#include "storystyle/trainer.h"
#include "storystyle/wav.h"

namespace storystyle {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

void require_file(const fs::path& path, std::string_view what) {
  if (path.empty()) {
    throw MissingInputError(std::string(what) + " path is not configured");
  }
  if (!fs::is_regular_file(path)) {
    throw MissingInputError(std::string(what) + " not found: " + path.string());
  }
}

void write_output(CommandResult& result, const fs::path& path, std::string_view text) {
  write_text_file(path, text);
  result.outputs.push_back(path);
}

std::string kv_line(std::string_view key, std::string_view value) {
  return "  " + std::string(key) + " = " + std::string(value) + "\n";
}

CorpusManifest load_checked_manifest(const fs::path& path, const PipelineConfig& config,
                                     std::string_view what) {
  require_file(path, what);
  CorpusManifest manifest = load_manifest(path);
  if (manifest.sample_rate_hz != config.style.mel.sample_rate_hz) {
    throw ValidationError(path.string() + ": sample rate " +
                          std::to_string(manifest.sample_rate_hz) +
                          " Hz differs from configured sample_rate_hz " +
                          std::to_string(config.style.mel.sample_rate_hz));
  }
  return manifest;
}

}  // namespace

std::uint64_t PipelineConfig::stage_seed(std::string_view stage) const {
  return derive_seed(seed, stage);
}

PipelineConfig pipeline_config_from(const KeyValueConfig& kv, const fs::path& base_dir) {
  PipelineConfig c;
  auto path_key = [&](std::string_view key, fs::path& field) {
    if (auto v = kv.get_string(key)) field = resolve(base_dir, *v);
  };
  path_key("manifest", c.manifest);
  path_key("labels", c.labels);
  path_key("out_dir", c.out_dir);
  path_key("eval_manifest", c.eval_manifest);
  path_key("eval_labels", c.eval_labels);
  path_key("alignments_dir", c.alignments_dir);
  path_key("baseline_alignments_dir", c.baseline_alignments_dir);
  if (auto v = kv.get_string("classifier")) c.classifier = *v;
  if (auto v = kv.get_int("seed")) {
    if (*v < 0) throw ValidationError("config key 'seed' must be non-negative");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto v = kv.get_double("pause_cutoff_s")) c.pause_cutoff_s = *v;
  if (auto v = kv.get_double("emotion_threshold")) c.emotion_threshold = *v;
  if (auto v = kv.get_string("pairing_mode")) {
    auto mode = parse_pairing_mode(*v);
    if (!mode) {
      throw ValidationError("config key 'pairing_mode': expected consecutive or "
                            "emotion, got '" + *v + "'");
    }
    c.pairing_mode = *mode;
  }
  if (auto v = kv.get_bool("include_neutral")) c.include_neutral = *v;
  if (auto v = kv.get_int("max_pairs_per_utterance")) {
    c.max_pairs_per_utterance = static_cast<int>(*v);
  }
  if (auto v = kv.get_bool("cross_story")) c.cross_story = *v;
  if (auto v = kv.get_int("train_steps")) c.train_steps = *v;
  if (auto v = kv.get_int("batch_size")) c.batch_size = static_cast<int>(*v);
  if (auto v = kv.get_double("probe_test_fraction")) c.probe_test_fraction = *v;
  if (auto v = kv.get_int("probe_repeats")) c.probe_repeats = static_cast<int>(*v);
  c.style = style_config_from(kv);
  c.style.validate();

  const auto unused = kv.unused_keys();
  if (!unused.empty()) {
    std::string names;
    for (const auto& k : unused) names += (names.empty() ? "" : ", ") + k;
    throw ValidationError("unknown config key(s): " + names);
  }
  if (!(c.pause_cutoff_s > 0.0)) throw ValidationError("pause_cutoff_s must be positive");
  if (!(c.emotion_threshold >= 0.0 && c.emotion_threshold <= 1.0)) {
    throw ValidationError("emotion_threshold must lie in [0, 1]");
  }
  if (c.train_steps < 0) throw ValidationError("train_steps must be non-negative");
  if (c.batch_size < 1) throw ValidationError("batch_size must be positive");
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  return pipeline_config_from(KeyValueConfig::load(path), path.parent_path());
}

// ---------------------------------------------------------------------------

CommandResult cmd_stats(const PipelineConfig& config) {
  const CorpusManifest manifest =
      load_checked_manifest(config.manifest, config, "corpus manifest");
  CommandResult result;
  std::string text = "corpus statistics\n" +
                     kv_line("manifest", config.manifest.filename().string()) +
                     kv_line("utterances", std::to_string(manifest.records.size())) +
                     kv_line("stories", std::to_string(story_spans(manifest).size()));
  std::string tsv;
  for (int g = 1; g <= 3; ++g) {
    const LengthStats s = compute_length_stats(manifest, g);
    const std::string prefix = "length_g" + std::to_string(g);
    text += "group of " + std::to_string(g) + " utterance(s)\n" +
            kv_line("count", std::to_string(s.count)) +
            kv_line("mean_s", format_fixed(s.mean_s, 4)) +
            kv_line("min_s", format_fixed(s.min_s, 4)) +
            kv_line("max_s", format_fixed(s.max_s, 4));
    const auto n = static_cast<std::size_t>(s.count);
    tsv += format_metric_line(prefix + "_mean_s", s.mean_s, n) +
           format_metric_line(prefix + "_min_s", s.min_s, n) +
           format_metric_line(prefix + "_max_s", s.max_s, n);
  }
  const PauseExtraction extraction = extract_pauses(manifest);
  const PauseDistribution fit =
      fit_pause_distribution(extraction.pauses, config.pause_cutoff_s);
  text += "inter-utterance pauses\n" +
          kv_line("extracted", std::to_string(extraction.pauses.size())) +
          kv_line("clamped_overlaps", std::to_string(extraction.n_clamped)) +
          kv_line("cutoff_s", format_double(fit.cutoff_s)) +
          kv_line("excluded", std::to_string(fit.n_excluded)) +
          kv_line("mean_s", format_fixed(fit.mean_s, 4)) +
          kv_line("std_s", format_fixed(fit.std_s, 4));
  const auto n = static_cast<std::size_t>(fit.n_samples);
  tsv += format_metric_line("pause_mean_s", fit.mean_s, n) +
         format_metric_line("pause_std_s", fit.std_s, n) +
         format_metric_line("pause_excluded", static_cast<double>(fit.n_excluded),
                            extraction.pauses.size()) +
         format_metric_line("pause_clamped", static_cast<double>(extraction.n_clamped),
                            extraction.pauses.size());
  write_output(result, config.stats_dir() / "stats.txt", text);
  write_output(result, config.stats_dir() / "stats.tsv", tsv);
  result.report = text;
  return result;
}

// ---------------------------------------------------------------------------

CommandResult cmd_label(const PipelineConfig& config) {
  const CorpusManifest manifest =
      load_checked_manifest(config.manifest, config, "corpus manifest");
  LabelMap labels;
  std::string source;
  if (config.classifier) {
    const auto endpoint = ClassifierEndpoint::parse(*config.classifier);
    source = "classifier " + endpoint.address();
    for (const auto& r : manifest.records) {
      const Classification c = classify_remote(r.text, endpoint);
      labels[r.id] = LabelRecord{r.id, c.label, c.score, c.label};
    }
  } else {
    require_file(config.labels, "label file");
    labels = load_labels(config.labels);
    source = config.labels.filename().string();
  }
  apply_threshold(labels, config.emotion_threshold);

  CommandResult result;
  const auto dist = label_distribution(labels);
  const double match = consecutive_match_rate(manifest, labels);
  std::string text = "emotion labels\n" + kv_line("source", source) +
                     kv_line("threshold", format_double(config.emotion_threshold)) +
                     kv_line("labelled", std::to_string(labels.size()));
  std::string tsv;
  for (Emotion e : kAllEmotions) {
    const double pct = dist.at(e);
    text += kv_line(std::string(to_string(e)) + "_pct", format_fixed(pct, 2));
    tsv += format_metric_line(std::string("label_pct_") + std::string(to_string(e)),
                              pct, labels.size());
  }
  text += kv_line("consecutive_match_rate", format_fixed(match, 4));
  tsv += format_metric_line("consecutive_match_rate", match, manifest.records.size());
  write_output(result, config.labels_out(), serialize_labels(labels));
  write_output(result, config.out_dir / "label_stats.tsv", tsv);
  result.report = text;
  return result;
}

// ---------------------------------------------------------------------------

CommandResult cmd_augment(const PipelineConfig& config) {
  const CorpusManifest manifest =
      load_checked_manifest(config.manifest, config, "corpus manifest");
  LabelMap labels;
  if (config.pairing_mode == PairingMode::kEmotionMatched) {
    require_file(config.labels_out(), "label file (run `label` first)");
    labels = load_labels(config.labels_out());
  }
  const PauseExtraction extraction = extract_pauses(manifest);
  const PauseDistribution dist =
      fit_pause_distribution(extraction.pauses, config.pause_cutoff_s);

  PairingPolicy policy;
  policy.mode = config.pairing_mode;
  policy.include_neutral = config.include_neutral;
  policy.max_pairs_per_utterance = config.max_pairs_per_utterance;
  policy.cross_story = config.cross_story;
  policy.seed = config.stage_seed("augment.pairs");
  const auto candidates = build_pairs(manifest, labels, policy);
  if (candidates.empty()) throw ValidationError("no utterance pairs could be formed");

  Rng pause_rng(config.stage_seed("augment.pause"));
  const auto pairs = plan_augmented_pairs(manifest, candidates, dist, pause_rng);

  // Stale renders from an earlier run would otherwise linger next to the new ones.
  std::error_code ec;
  fs::remove_all(config.augmented_dir() / "wav", ec);
  const AugmentedOutput out =
      emit_augmented_manifest(manifest, pairs, config.augmented_dir());

  if (config.pairing_mode == PairingMode::kEmotionMatched) {
    const auto problems =
        audit_emotion_consistency(load_pair_metadata(out.metadata_path), labels);
    if (!problems.empty()) {
      throw ValidationError("emotion audit failed: " + problems.front());
    }
  }
  const auto term = audit_terminators(load_manifest(out.manifest_path));
  if (!term.empty()) throw ValidationError("terminator audit failed: " + term.front());

  double pause_sum = 0.0;
  for (const auto& p : pairs) pause_sum += p.pause_s;
  CommandResult result;
  result.outputs = {out.manifest_path, out.metadata_path};
  result.report = "augmentation\n" +
                  kv_line("mode", to_string(config.pairing_mode)) +
                  kv_line("pairs", std::to_string(pairs.size())) +
                  kv_line("pause_fit_mean_s", format_fixed(dist.mean_s, 4)) +
                  kv_line("pause_fit_std_s", format_fixed(dist.std_s, 4)) +
                  kv_line("inserted_pause_mean_s",
                          format_fixed(pause_sum / static_cast<double>(pairs.size()), 4)) +
                  kv_line("manifest", out.manifest_path.string());
  return result;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<StyleSample> load_training_samples(const PipelineConfig& config) {
  const fs::path manifest_path = config.augmented_dir() / kAugmentedManifestName;
  const fs::path pairs_path = config.augmented_dir() / kPairMetadataName;
  require_file(manifest_path, "augmented manifest (run `augment` first)");
  require_file(pairs_path, "pair metadata (run `augment` first)");
  const CorpusManifest source =
      load_checked_manifest(config.manifest, config, "corpus manifest");
  const CorpusManifest augmented =
      load_checked_manifest(manifest_path, config, "augmented manifest");
  const auto metadata = load_pair_metadata(pairs_path);

  std::vector<StyleSample> samples;
  samples.reserve(metadata.size());
  for (const auto& m : metadata) {
    const UtteranceRecord* rec = augmented.find(m.pair_id);
    const UtteranceRecord* first = source.find(m.first_id);
    if (!rec) throw ValidationError("pair '" + m.pair_id + "' missing from manifest");
    if (!first) {
      throw ValidationError("pair '" + m.pair_id + "' refers to unknown utterance '" +
                            m.first_id + "'");
    }
    StyleSample s;
    s.id = m.pair_id;
    s.mel = compute_mel(load_utterance_audio(augmented, *rec), config.style.mel);
    s.text = rec->text;
    s.sentence_boundary = joined_text_boundary(first->text);
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw ValidationError("augmented manifest is empty");
  return samples;
}

}  // namespace

CommandResult cmd_train_style(const PipelineConfig& config) {
  const auto samples = load_training_samples(config);
  StyleModel model;
  std::int64_t first_step = 0;
  if (config.resume) {
    require_file(config.checkpoint_path(), "checkpoint");
    Checkpoint ckpt = load_checkpoint(config.checkpoint_path());
    if (style_config_to_kv(ckpt.model.config).serialize() !=
        style_config_to_kv(config.style).serialize()) {
      throw ValidationError(config.checkpoint_path().string() +
                            ": style settings differ from the current config");
    }
    model = std::move(ckpt.model);
    first_step = ckpt.step;
  } else {
    model = make_style_model(config.style, config.stage_seed("style.init"));
  }

  const fs::path log_path = config.style_dir() / "loss_log.tsv";
  std::string log;
  if (config.resume && fs::is_regular_file(log_path)) {
    log = read_text_file(log_path);
  } else {
    log = std::string(kLossLogHeader) + "\n";
  }
  const auto reports =
      train_style(model, samples, std::min<int>(config.batch_size,
                                                static_cast<int>(samples.size())),
                  config.stage_seed("style.train"), first_step, config.train_steps);
  for (const auto& r : reports) log += format_step_report(r) + "\n";

  CommandResult result;
  save_checkpoint(config.checkpoint_path(), model, first_step + config.train_steps);
  result.outputs.push_back(config.checkpoint_path());
  write_output(result, log_path, log);

  std::string text = "style training\n" +
                     kv_line("samples", std::to_string(samples.size())) +
                     kv_line("first_step", std::to_string(first_step)) +
                     kv_line("steps", std::to_string(config.train_steps));
  if (!reports.empty()) {
    text += kv_line("initial_total", format_fixed(reports.front().total, 6)) +
            kv_line("final_total", format_fixed(reports.back().total, 6));
  }
  text += kv_line("checkpoint", config.checkpoint_path().string());
  result.report = text;
  return result;
}

// ---------------------------------------------------------------------------

namespace {

struct PairPauses {
  std::vector<double> pauses;
  std::size_t clamped = 0;
};

// One TextGrid per consecutive utterance pair, named after the first id.
PairPauses measure_alignment_pauses(const CorpusManifest& manifest,
                                    const fs::path& dir) {
  if (dir.empty()) throw MissingInputError("alignments_dir is not configured");
  std::vector<std::pair<const UtteranceRecord*, fs::path>> jobs;
  std::vector<std::string> missing;
  for (const auto& span : story_spans(manifest)) {
    for (std::size_t i = span.begin; i + 1 < span.end; ++i) {
      const auto& rec = manifest.records[i];
      fs::path p = dir / (rec.id + ".TextGrid");
      if (!fs::is_regular_file(p)) missing.push_back(rec.id);
      jobs.emplace_back(&rec, std::move(p));
    }
  }
  if (!missing.empty()) {
    std::string ids;
    for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    throw MissingInputError("missing alignment files in " + dir.string() +
                            " for utterance(s): " + ids);
  }
  if (jobs.empty()) throw ValidationError("eval manifest has no consecutive pairs");
  PairPauses out;
  for (const auto& [rec, path] : jobs) {
    const auto words = count_alignable_words(rec->text);
    const auto m = measure_intersentence_pause(load_textgrid(path), words);
    out.pauses.push_back(m.pause_s);
    if (m.clamped) ++out.clamped;
  }
  return out;
}

}  // namespace

CommandResult cmd_eval(const PipelineConfig& config) {
  const fs::path manifest_path =
      config.eval_manifest.empty() ? config.manifest : config.eval_manifest;
  const fs::path labels_path =
      config.eval_labels.empty() ? config.labels_out() : config.eval_labels;
  const CorpusManifest manifest =
      load_checked_manifest(manifest_path, config, "eval manifest");
  require_file(config.checkpoint_path(), "checkpoint (run `train-style` first)");
  require_file(labels_path, "eval label file");
  const Checkpoint ckpt = load_checkpoint(config.checkpoint_path());
  const LabelMap labels = load_labels(labels_path);

  CommandResult result;
  std::string text = "evaluation\n" +
                     kv_line("manifest", manifest_path.filename().string()) +
                     kv_line("checkpoint_step", std::to_string(ckpt.step));
  std::string tsv;

  // Inter-sentence pauses against the held-out recordings.
  const PauseExtraction truth = extract_pauses(manifest);
  const PairPauses synth = measure_alignment_pauses(manifest, config.alignments_dir);
  const PauseComparison cmp =
      compare_pause_distributions(synth.pauses, truth.pauses, "system");
  text += cmp.report + kv_line("clamped_alignments", std::to_string(synth.clamped));
  tsv += cmp.machine_lines;
  if (!config.baseline_alignments_dir.empty()) {
    const PairPauses base =
        measure_alignment_pauses(manifest, config.baseline_alignments_dir);
    const PauseComparison bcmp =
        compare_pause_distributions(base.pauses, truth.pauses, "baseline");
    text += bcmp.report + closer_to_ground_truth("system", cmp.ks, "baseline", bcmp.ks);
    const std::size_t n = bcmp.ks.n1 + bcmp.ks.n2;
    tsv += format_metric_line("baseline_ks_statistic", bcmp.ks.statistic, n) +
           format_metric_line("baseline_ks_p_value", bcmp.ks.p_value, n);
  }

  // TP-GST prediction against GST embeddings of each held-out utterance.
  std::vector<Eigen::VectorXd> embeddings;
  std::vector<Emotion> emotions;
  double l1_sum = 0.0;
  std::vector<std::string> unlabelled;
  for (const auto& rec : manifest.records) {
    const MelSpectrogram mel =
        compute_mel(load_utterance_audio(manifest, rec), ckpt.model.config.mel);
    const StyleEmbedding gst = extract_gst_embedding(ckpt.model, mel);
    const auto predicted = predict_tpgst_embeddings(ckpt.model, terminate_text(rec.text));
    l1_sum += tpgst_l1(predicted.front().vector, gst.vector);
    auto it = labels.find(rec.id);
    if (it == labels.end()) {
      unlabelled.push_back(rec.id);
      continue;
    }
    embeddings.push_back(gst.vector);
    emotions.push_back(it->second.effective_category);
  }
  if (!unlabelled.empty()) {
    std::string ids;
    for (const auto& id : unlabelled) ids += (ids.empty() ? "" : ", ") + id;
    throw MissingInputError(labels_path.string() + " has no label for: " + ids);
  }
  const double l1 = l1_sum / static_cast<double>(manifest.records.size());
  text += "tp-gst\n" + kv_line("l1", format_fixed(l1, 6)) +
          kv_line("utterances", std::to_string(manifest.records.size()));
  tsv += format_metric_line("tpgst_l1", l1, manifest.records.size());

  ProbeOptions options;
  options.test_fraction = config.probe_test_fraction;
  options.repeats = config.probe_repeats;
  const std::uint64_t probe_seed = config.stage_seed("eval.probe");
  const ProbeResult probe = emotion_probe(embeddings, emotions, probe_seed, options);
  text += "emotion probe\n" +
          kv_line("classes", std::to_string(probe.n_classes)) +
          kv_line("repeats", std::to_string(probe.per_run.size())) +
          kv_line("test_size", std::to_string(probe.n_test)) +
          kv_line("mean_accuracy", format_fixed(probe.mean_accuracy, 4));
  tsv += format_metric_line("probe_accuracy", probe.mean_accuracy, embeddings.size(),
                            probe_seed);

  write_output(result, config.eval_dir() / "report.txt", text);
  write_output(result, config.eval_dir() / "metrics.tsv", tsv);
  result.report = text;
  return result;
}

}  // namespace storystyle
