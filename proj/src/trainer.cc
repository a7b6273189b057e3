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

#include "storystyle/trainer.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "storystyle/contrastive.h"
#include "storystyle/error.h"
#include "storystyle/text_util.h"

namespace storystyle {
namespace {

using nn::Mat;
using nn::Vec;

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint encoding assumes a little-endian host");
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(std::string_view bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + at_, sizeof(T));
    at_ += sizeof(T);
    return value;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto out = bytes_.substr(at_, n);
    at_ += n;
    return out;
  }

  bool done() const { return at_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - at_ < n) {
      throw ValidationError(source_ + ": truncated checkpoint");
    }
  }

  std::string_view bytes_;
  std::string source_;
  std::size_t at_ = 0;
};

constexpr std::string_view kMagic = "STYLECKP";

}  // namespace

StyleConfig style_config_from(const KeyValueConfig& kv, StyleConfig base) {
  StyleConfig c = std::move(base);
  auto set_int = [&](std::string_view key, int& field) {
    if (auto v = kv.get_int(key)) field = static_cast<int>(*v);
  };
  auto set_double = [&](std::string_view key, double& field) {
    if (auto v = kv.get_double(key)) field = *v;
  };
  set_int("sample_rate_hz", c.mel.sample_rate_hz);
  set_int("n_fft", c.mel.n_fft);
  set_int("win_length", c.mel.win_length);
  set_int("hop_length", c.mel.hop_length);
  set_int("n_mels", c.mel.n_mels);
  set_double("fmin_hz", c.mel.fmin_hz);
  set_double("fmax_hz", c.mel.fmax_hz);
  if (auto v = kv.get_int_list("conv_channels")) c.conv_channels = *v;
  set_int("conv_kernel", c.conv.kernel);
  set_int("conv_stride", c.conv.stride);
  set_int("conv_padding", c.conv.padding);
  set_int("ref_gru_units", c.ref_gru_units);
  set_int("d_query", c.d_query);
  set_int("n_tokens", c.n_tokens);
  set_int("n_heads", c.n_heads);
  set_int("d_token", c.d_token);
  set_int("d_style", c.d_style);
  set_int("text_vocab", c.text_vocab);
  set_int("text_embed_dim", c.text_embed_dim);
  set_int("text_units", c.text_units);
  set_int("tpgst_hidden", c.tpgst_hidden);
  set_double("temperature", c.temperature);
  set_double("simclr_scale", c.simclr_scale);
  set_double("conditioning_prob", c.conditioning_prob);
  set_double("mask_s", c.mask_s);
  set_double("learning_rate", c.learning_rate);
  return c;
}

KeyValueConfig style_config_to_kv(const StyleConfig& c) {
  KeyValueConfig kv;
  auto i = [&](const char* key, int v) { kv.set(key, std::to_string(v)); };
  auto d = [&](const char* key, double v) { kv.set(key, format_double(v)); };
  i("sample_rate_hz", c.mel.sample_rate_hz);
  i("n_fft", c.mel.n_fft);
  i("win_length", c.mel.win_length);
  i("hop_length", c.mel.hop_length);
  i("n_mels", c.mel.n_mels);
  d("fmin_hz", c.mel.fmin_hz);
  d("fmax_hz", c.mel.fmax_hz);
  kv.set("conv_channels", join_ints(c.conv_channels));
  i("conv_kernel", c.conv.kernel);
  i("conv_stride", c.conv.stride);
  i("conv_padding", c.conv.padding);
  i("ref_gru_units", c.ref_gru_units);
  i("d_query", c.d_query);
  i("n_tokens", c.n_tokens);
  i("n_heads", c.n_heads);
  i("d_token", c.d_token);
  i("d_style", c.d_style);
  i("text_vocab", c.text_vocab);
  i("text_embed_dim", c.text_embed_dim);
  i("text_units", c.text_units);
  i("tpgst_hidden", c.tpgst_hidden);
  d("temperature", c.temperature);
  d("simclr_scale", c.simclr_scale);
  d("conditioning_prob", c.conditioning_prob);
  d("mask_s", c.mask_s);
  d("learning_rate", c.learning_rate);
  return kv;
}

Eigen::Index joined_text_boundary(std::string_view first_sentence) {
  std::string_view body = trim(first_sentence);
  if (!body.empty() && body.back() == '~') body = trim(body.substr(0, body.size() - 1));
  if (body.empty()) throw ValidationError("empty first sentence");
  return static_cast<Eigen::Index>(body.size()) + 1;
}

StepReport evaluate_batch(const StyleModel& model,
                          std::span<const StyleSample> batch, Rng& rng,
                          StyleParams* grad) {
  const StyleConfig& cfg = model.config;
  const StyleParams& params = model.params;
  if (batch.empty()) throw ValidationError("empty training batch");
  if (grad) *grad = zeros_like(params);

  std::size_t predictions = 0;
  for (const auto& s : batch) predictions += s.sentence_boundary ? 2 : 1;
  const double l1_norm =
      1.0 / (static_cast<double>(predictions) * cfg.d_style);

  StepReport report;
  const bool contrastive = batch.size() >= 2;
  Mat views(2 * static_cast<Eigen::Index>(batch.size()), cfg.d_style);
  std::vector<ReferenceCache> ref_caches(contrastive ? views.rows() : 0);
  std::vector<GstCache> gst_caches(contrastive ? views.rows() : 0);

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const StyleSample& sample = batch[b];
    if (rng.bernoulli(cfg.conditioning_prob)) {
      ++report.gst_conditioned;
    } else {
      ++report.tpgst_conditioned;
    }
    const MaskedView view_a = mask_view(sample.mel, rng, cfg.mask_s);
    const MaskedView view_b = mask_view(sample.mel, rng, cfg.mask_s);

    // L1 target: no cache, so nothing flows back into the GST path.
    const Vec target = extract_gst_embedding(model, sample.mel).vector;

    TextCache text_cache;
    TpGstCache tpgst_cache;
    const TextEncoding encoding = encode_text(
        sample.text, sample.sentence_boundary, params.text, &text_cache);
    const auto predicted = tpgst_predict(encoding, params.tpgst, &tpgst_cache);
    std::vector<Vec> d_pred;
    for (const auto& p : predicted) {
      const Vec diff = p.vector - target;
      report.l1 += diff.cwiseAbs().sum() * l1_norm;
      d_pred.push_back(diff.unaryExpr([&](double x) {
        return (x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0)) * l1_norm;
      }));
    }
    if (grad) {
      Mat d_states;
      tpgst_backward(tpgst_cache, params.tpgst, d_pred, grad->tpgst, &d_states);
      text_backward(text_cache, params.text, d_states, grad->text);
    }

    if (contrastive) {
      const Eigen::Index row = 2 * static_cast<Eigen::Index>(b);
      const MaskedView* vs[2] = {&view_a, &view_b};
      for (int k = 0; k < 2; ++k) {
        const Vec query =
            reference_encode(normalize_mel_for_encoder(vs[k]->mel),
                             params.reference, cfg, &ref_caches[row + k]);
        views.row(row + k) =
            gst_attend(query, params.gst, &gst_caches[row + k])
                .embedding.vector.transpose();
      }
    }
  }

  if (contrastive) {
    Mat d_views;
    report.simclr = nt_xent_loss({views, cfg.temperature}, grad ? &d_views : nullptr);
    if (grad) {
      for (Eigen::Index v = 0; v < views.rows(); ++v) {
        const Vec d_embedding = cfg.simclr_scale * d_views.row(v).transpose();
        Vec d_query;
        gst_backward(gst_caches[v], params.gst, d_embedding, grad->gst, &d_query);
        reference_backward(ref_caches[v], params.reference, cfg, d_query,
                           grad->reference, nullptr);
      }
    }
  }
  report.total = report.l1 + cfg.simclr_scale * report.simclr;
  return report;
}

StepReport training_step(StyleModel& model, std::span<const StyleSample> batch,
                         Rng& rng, std::int64_t step) {
  StyleParams grad;
  StepReport report = evaluate_batch(model, batch, rng, &grad);
  report.step = step;
  if (!std::isfinite(report.total)) {
    throw NumericError("step " + std::to_string(step) +
                       ": non-finite loss (l1 " + format_double(report.l1) +
                       ", simclr " + format_double(report.simclr) + ")");
  }
  auto params = model.params.tensors();
  const auto grads = grad.tensors();
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (Eigen::Index i = 0; i < params[t].size(); ++i) {
      if (!std::isfinite(grads[t].data[i])) {
        throw NumericError("step " + std::to_string(step) +
                           ": non-finite gradient in " + params[t].name);
      }
    }
  }
  const double lr = model.config.learning_rate;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (Eigen::Index i = 0; i < params[t].size(); ++i) {
      params[t].data[i] -= lr * grads[t].data[i];
    }
  }
  return report;
}

std::vector<StepReport> train_style(
    StyleModel& model, std::span<const StyleSample> samples, int batch_size,
    std::uint64_t seed, std::int64_t first_step, std::int64_t steps,
    const std::function<void(const StepReport&)>& on_step) {
  if (samples.empty()) throw ValidationError("no training samples");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  const std::size_t take =
      std::min<std::size_t>(static_cast<std::size_t>(batch_size), samples.size());
  std::vector<StepReport> reports;
  std::vector<StyleSample> batch;
  for (std::int64_t s = first_step; s < first_step + steps; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    batch.clear();
    for (std::size_t i = 0; i < take; ++i) batch.push_back(samples[order[i]]);
    reports.push_back(training_step(model, batch, rng, s));
    if (on_step) on_step(reports.back());
  }
  return reports;
}

std::string format_step_report(const StepReport& r) {
  std::ostringstream out;
  out << r.step << '\t' << format_double(r.total) << '\t' << format_double(r.l1)
      << '\t' << format_double(r.simclr) << '\t' << r.gst_conditioned << '\t'
      << r.tpgst_conditioned;
  return out.str();
}

std::string encode_checkpoint(const StyleModel& model, std::int64_t step) {
  std::string out(kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::int64_t>(out, step);
  const std::string config = style_config_to_kv(model.config).serialize();
  put<std::uint64_t>(out, config.size());
  out += config;
  const auto tensors = model.params.tensors();
  put<std::uint64_t>(out, tensors.size());
  for (const auto& t : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t.rows));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t.cols));
    for (Eigen::Index i = 0; i < t.rows; ++i) {
      for (Eigen::Index j = 0; j < t.cols; ++j) put<double>(out, t.at(i, j));
    }
  }
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes, std::string_view source) {
  const std::string src(source);
  Reader in(bytes, src);
  if (in.take(kMagic.size()) != kMagic) {
    throw ValidationError(src + ": not a style checkpoint");
  }
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw ValidationError(src + ": unsupported checkpoint version " +
                          std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.step = in.get<std::int64_t>();
  const auto config_len = in.get<std::uint64_t>();
  const auto kv = KeyValueConfig::parse(in.take(config_len), src);
  ckpt.model.config = style_config_from(kv);
  ckpt.model.config.validate();
  ckpt.model.params = init_style_params(ckpt.model.config, 0);

  auto tensors = ckpt.model.params.tensors();
  const auto count = in.get<std::uint64_t>();
  if (count != tensors.size()) {
    throw ValidationError(src + ": expected " + std::to_string(tensors.size()) +
                          " tensors, found " + std::to_string(count));
  }
  for (auto& t : tensors) {
    const auto name_len = in.get<std::uint32_t>();
    const auto name = in.take(name_len);
    const auto rows = in.get<std::uint64_t>();
    const auto cols = in.get<std::uint64_t>();
    if (name != t.name || rows != static_cast<std::uint64_t>(t.rows) ||
        cols != static_cast<std::uint64_t>(t.cols)) {
      throw ValidationError(src + ": tensor '" + std::string(name) +
                            "' does not match expected '" + t.name + "' [" +
                            std::to_string(t.rows) + " x " +
                            std::to_string(t.cols) + "]");
    }
    for (Eigen::Index i = 0; i < t.rows; ++i) {
      for (Eigen::Index j = 0; j < t.cols; ++j) t.at(i, j) = in.get<double>();
    }
  }
  if (!in.done()) throw ValidationError(src + ": trailing bytes in checkpoint");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const StyleModel& model,
                     std::int64_t step) {
  write_text_file(path, encode_checkpoint(model, step));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_text_file(path), path.string());
}

}  // namespace storystyle
