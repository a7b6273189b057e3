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

#include "storystyle/style_model.h"

#include <cmath>

#include "storystyle/error.h"
#include "storystyle/rng.h"

namespace storystyle {
namespace {

using nn::Mat;
using nn::Vec;

void glorot(Mat& m, Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
    }
  }
}

void init_gru(nn::GruParams& p, int input, int hidden, Rng& rng) {
  p.w_input.resize(3 * hidden, input);
  p.w_hidden.resize(3 * hidden, hidden);
  glorot(p.w_input, input, hidden, rng);
  glorot(p.w_hidden, hidden, hidden, rng);
  p.b_input = Vec::Zero(3 * hidden);
  p.b_hidden = Vec::Zero(3 * hidden);
}

void init_dense(DenseParams& p, int input, int output, Rng& rng) {
  p.weight.resize(output, input);
  glorot(p.weight, input, output, rng);
  p.bias = Vec::Zero(output);
}

void check_finite(const Mat& m, const char* layer) {
  if (!m.allFinite()) {
    throw NumericError(std::string("non-finite activations in ") + layer);
  }
}

template <typename T>
void add_tensor(std::vector<TensorRef>& out, std::string name, T& m) {
  out.push_back({std::move(name), m.data(), m.rows(), m.cols()});
}

void add_gru(std::vector<TensorRef>& out, const std::string& prefix,
             nn::GruParams& p) {
  add_tensor(out, prefix + ".w_input", p.w_input);
  add_tensor(out, prefix + ".w_hidden", p.w_hidden);
  add_tensor(out, prefix + ".b_input", p.b_input);
  add_tensor(out, prefix + ".b_hidden", p.b_hidden);
}

void add_dense(std::vector<TensorRef>& out, const std::string& prefix,
               DenseParams& p) {
  add_tensor(out, prefix + ".weight", p.weight);
  add_tensor(out, prefix + ".bias", p.bias);
}

}  // namespace

void StyleConfig::validate() const {
  mel.validate();
  if (conv_channels.empty()) throw ValidationError("conv_channels is empty");
  for (int c : conv_channels) {
    if (c <= 0) throw ValidationError("conv channel counts must be positive");
  }
  if (conv.kernel <= 0 || conv.stride <= 0 || conv.padding < 0) {
    throw ValidationError("invalid conv geometry");
  }
  if (ref_gru_units <= 0 || d_query <= 0 || n_tokens < 1 || n_heads < 1 ||
      d_token <= 0 || d_style <= 0 || text_vocab <= 0 || text_embed_dim <= 0 ||
      text_units <= 0 || tpgst_hidden <= 0) {
    throw ValidationError("style model sizes must be positive");
  }
  if (d_token % n_heads != 0 || d_style % n_heads != 0) {
    throw ValidationError("d_token and d_style must be divisible by n_heads");
  }
  if (encoder_output_mels() < 1) {
    throw ValidationError("conv stack reduces the mel axis to nothing");
  }
  if (!(temperature > 0.0)) throw ValidationError("temperature must be > 0");
  if (!(simclr_scale >= 0.0)) throw ValidationError("simclr_scale must be >= 0");
  if (!(conditioning_prob >= 0.0 && conditioning_prob <= 1.0)) {
    throw ValidationError("conditioning_prob must lie in [0, 1]");
  }
  if (!(mask_s > 0.0)) throw ValidationError("mask_s must be > 0");
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
}

int StyleConfig::encoder_output_mels() const {
  int f = mel.n_mels;
  for (std::size_t i = 0; i < conv_channels.size(); ++i) f = conv.output_size(f);
  return f;
}

std::vector<TensorRef> StyleParams::tensors() {
  std::vector<TensorRef> out;
  for (std::size_t l = 0; l < reference.convs.size(); ++l) {
    const std::string prefix = "ref.conv" + std::to_string(l);
    add_tensor(out, prefix + ".weight", reference.convs[l].weight);
    add_tensor(out, prefix + ".bias", reference.convs[l].bias);
  }
  add_gru(out, "ref.gru", reference.gru);
  add_dense(out, "ref.proj", reference.projection);
  add_tensor(out, "gst.tokens", gst.tokens);
  add_tensor(out, "gst.w_query", gst.w_query);
  add_tensor(out, "gst.w_key", gst.w_key);
  add_tensor(out, "gst.w_value", gst.w_value);
  add_tensor(out, "text.embedding", text.embedding);
  add_gru(out, "text.gru", text.gru);
  add_dense(out, "tpgst.hidden", tpgst.hidden);
  add_dense(out, "tpgst.out", tpgst.output);
  return out;
}

StyleParams init_style_params(const StyleConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  StyleParams p;
  const int k = config.conv.kernel;
  int in_ch = 1;
  for (int out_ch : config.conv_channels) {
    nn::Conv2dParams conv;
    conv.weight.resize(out_ch, in_ch * k * k);
    glorot(conv.weight, in_ch * k * k, out_ch * k * k, rng);
    conv.bias = Vec::Zero(out_ch);
    p.reference.convs.push_back(std::move(conv));
    in_ch = out_ch;
  }
  init_gru(p.reference.gru, in_ch * config.encoder_output_mels(),
           config.ref_gru_units, rng);
  init_dense(p.reference.projection, config.ref_gru_units, config.d_query, rng);

  p.gst.n_heads = config.n_heads;
  p.gst.tokens.resize(config.n_tokens, config.d_token);
  for (Eigen::Index i = 0; i < p.gst.tokens.size(); ++i) {
    p.gst.tokens.data()[i] = 0.5 * rng.normal();
  }
  p.gst.w_query.resize(config.d_style, config.d_query);
  p.gst.w_key.resize(config.d_style, config.d_token);
  p.gst.w_value.resize(config.d_style, config.d_token);
  glorot(p.gst.w_query, config.d_query, config.d_style, rng);
  glorot(p.gst.w_key, config.d_token, config.d_style, rng);
  glorot(p.gst.w_value, config.d_token, config.d_style, rng);

  p.text.embedding.resize(config.text_vocab, config.text_embed_dim);
  for (Eigen::Index i = 0; i < p.text.embedding.size(); ++i) {
    p.text.embedding.data()[i] = 0.5 * rng.normal();
  }
  init_gru(p.text.gru, config.text_embed_dim, config.text_units, rng);
  init_dense(p.tpgst.hidden, config.text_units, config.tpgst_hidden, rng);
  init_dense(p.tpgst.output, config.tpgst_hidden, config.d_style, rng);
  return p;
}

StyleParams zeros_like(const StyleParams& params) {
  StyleParams z = params;
  for (auto& t : z.tensors()) std::fill(t.data, t.data + t.size(), 0.0);
  return z;
}

// ---------------------------------------------------------------------------

Vec reference_encode(const Mat& input, const ReferenceEncoderParams& params,
                     const StyleConfig& config, ReferenceCache* cache) {
  if (input.cols() != config.mel.n_mels || input.rows() < 1) {
    throw ValidationError("reference encoder expects [T x " +
                          std::to_string(config.mel.n_mels) + "] input");
  }
  ReferenceCache local;
  ReferenceCache& c = cache ? *cache : local;
  c.activations.clear();
  c.activations.push_back(nn::FeatureMap{input});
  for (std::size_t l = 0; l < params.convs.size(); ++l) {
    nn::FeatureMap out =
        nn::conv2d_forward(c.activations.back(), params.convs[l], config.conv);
    for (auto& ch : out) {
      ch = ch.array().tanh().matrix();
      check_finite(ch, ("reference encoder conv" + std::to_string(l)).c_str());
    }
    c.activations.push_back(std::move(out));
  }
  const nn::FeatureMap& last = c.activations.back();
  const Eigen::Index steps = last[0].rows();
  const Eigen::Index width = last[0].cols();
  Mat seq(steps, static_cast<Eigen::Index>(last.size()) * width);
  for (std::size_t ch = 0; ch < last.size(); ++ch) {
    seq.middleCols(static_cast<Eigen::Index>(ch) * width, width) = last[ch];
  }
  c.gru = nn::gru_forward(seq, params.gru);
  check_finite(c.gru.h, "reference encoder gru");
  const Vec final_state = c.gru.h.row(steps).transpose();
  c.query = (params.projection.weight * final_state + params.projection.bias)
                .array()
                .tanh()
                .matrix();
  check_finite(c.query, "reference encoder projection");
  return c.query;
}

void reference_backward(const ReferenceCache& c,
                        const ReferenceEncoderParams& params,
                        const StyleConfig& config, const Vec& d_query,
                        ReferenceEncoderParams& grad, Mat* d_input) {
  const Eigen::Index steps = c.gru.x.rows();
  const Vec final_state = c.gru.h.row(steps).transpose();
  const Vec d_pre =
      d_query.array() * (1.0 - c.query.array().square());
  grad.projection.weight.noalias() += d_pre * final_state.transpose();
  grad.projection.bias += d_pre;

  Mat d_states = Mat::Zero(steps, params.gru.hidden_size());
  d_states.row(steps - 1) = (params.projection.weight.transpose() * d_pre).transpose();
  Mat d_seq;
  nn::gru_backward(c.gru, params.gru, d_states, grad.gru, &d_seq);

  const nn::FeatureMap& last = c.activations.back();
  const Eigen::Index width = last[0].cols();
  nn::FeatureMap d_act(last.size());
  for (std::size_t ch = 0; ch < last.size(); ++ch) {
    d_act[ch] = d_seq.middleCols(static_cast<Eigen::Index>(ch) * width, width);
  }
  for (std::size_t l = params.convs.size(); l-- > 0;) {
    const nn::FeatureMap& out = c.activations[l + 1];
    nn::FeatureMap d_pre_act(out.size());
    for (std::size_t ch = 0; ch < out.size(); ++ch) {
      d_pre_act[ch] =
          (d_act[ch].array() * (1.0 - out[ch].array().square())).matrix();
    }
    const bool need_input = l > 0 || d_input != nullptr;
    nn::FeatureMap d_in;
    nn::conv2d_backward(c.activations[l], d_pre_act, params.convs[l],
                        config.conv, grad.convs[l],
                        need_input ? &d_in : nullptr);
    if (l == 0) {
      if (d_input) *d_input = d_in[0];
    } else {
      d_act = std::move(d_in);
    }
  }
}

Mat normalize_mel_for_encoder(const MelSpectrogram& mel) {
  return ((mel.frames.array() - kLogMelFloor) / -kLogMelFloor).matrix();
}

// ---------------------------------------------------------------------------

GstOutput gst_attend(const Vec& query, const GstParams& params,
                     GstCache* cache) {
  const Eigen::Index d_style = params.w_query.rows();
  if (query.size() != params.w_query.cols() ||
      params.w_key.cols() != params.tokens.cols() ||
      params.w_value.cols() != params.tokens.cols() ||
      params.w_key.rows() != d_style || params.w_value.rows() != d_style) {
    throw ValidationError("gst_attend: dimension mismatch");
  }
  const int heads = params.n_heads;
  if (heads < 1 || d_style % heads != 0 || params.tokens.cols() % heads != 0) {
    throw ValidationError("gst_attend: head count must divide d_style and d_token");
  }
  const Eigen::Index d_head = d_style / heads;
  const Eigen::Index n_tokens = params.tokens.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_head));

  GstCache local;
  GstCache& c = cache ? *cache : local;
  c.query = query;
  c.token_act = params.tokens.array().tanh().matrix();
  c.projected_query = params.w_query * query;
  c.keys = c.token_act * params.w_key.transpose();
  c.values = c.token_act * params.w_value.transpose();
  c.weights.resize(heads, n_tokens);

  GstOutput out;
  out.embedding.source = StyleSource::kGst;
  out.embedding.vector = Vec::Zero(d_style);
  for (int h = 0; h < heads; ++h) {
    const auto q = c.projected_query.segment(h * d_head, d_head);
    Vec logits = c.keys.middleCols(h * d_head, d_head) * q * scale;
    const double top = logits.maxCoeff();
    Vec w = (logits.array() - top).exp().matrix();
    w /= w.sum();
    c.weights.row(h) = w.transpose();
    out.embedding.vector.segment(h * d_head, d_head) =
        c.values.middleCols(h * d_head, d_head).transpose() * w;
  }
  out.weights = c.weights;
  return out;
}

void gst_backward(const GstCache& c, const GstParams& params,
                  const Vec& d_embedding, GstParams& grad, Vec* d_query) {
  const Eigen::Index d_style = params.w_query.rows();
  const int heads = params.n_heads;
  const Eigen::Index d_head = d_style / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d_head));

  Vec d_proj_query = Vec::Zero(d_style);
  Mat d_keys = Mat::Zero(c.keys.rows(), c.keys.cols());
  Mat d_values = Mat::Zero(c.values.rows(), c.values.cols());
  for (int h = 0; h < heads; ++h) {
    const Vec w = c.weights.row(h).transpose();
    const auto d_out = d_embedding.segment(h * d_head, d_head);
    const auto values = c.values.middleCols(h * d_head, d_head);
    const auto keys = c.keys.middleCols(h * d_head, d_head);
    d_values.middleCols(h * d_head, d_head).noalias() += w * d_out.transpose();
    const Vec d_w = values * d_out;
    const Vec d_logits = (w.array() * (d_w.array() - w.dot(d_w))).matrix();
    d_proj_query.segment(h * d_head, d_head).noalias() +=
        keys.transpose() * d_logits * scale;
    d_keys.middleCols(h * d_head, d_head).noalias() +=
        d_logits * c.projected_query.segment(h * d_head, d_head).transpose() *
        scale;
  }
  grad.w_query.noalias() += d_proj_query * c.query.transpose();
  grad.w_key.noalias() += d_keys.transpose() * c.token_act;
  grad.w_value.noalias() += d_values.transpose() * c.token_act;
  const Mat d_act = d_keys * params.w_key + d_values * params.w_value;
  grad.tokens.array() += d_act.array() * (1.0 - c.token_act.array().square());
  if (d_query) *d_query = params.w_query.transpose() * d_proj_query;
}

// ---------------------------------------------------------------------------

TextEncoding encode_text(std::string_view text,
                         std::optional<Eigen::Index> sentence_boundary,
                         const TextEncoderParams& params, TextCache* cache) {
  if (text.empty()) throw ValidationError("cannot encode empty text");
  const auto length = static_cast<Eigen::Index>(text.size());
  if (sentence_boundary &&
      (*sentence_boundary < 1 || *sentence_boundary > length - 1)) {
    throw ValidationError("sentence boundary " +
                          std::to_string(*sentence_boundary) +
                          " outside [1, " + std::to_string(length - 1) + "]");
  }
  TextCache local;
  TextCache& c = cache ? *cache : local;
  c.ids.clear();
  Mat x(length, params.embedding.cols());
  for (Eigen::Index t = 0; t < length; ++t) {
    const int id = static_cast<unsigned char>(text[t]) %
                   static_cast<int>(params.embedding.rows());
    c.ids.push_back(id);
    x.row(t) = params.embedding.row(id);
  }
  c.gru = nn::gru_forward(x, params.gru);
  check_finite(c.gru.h, "text encoder gru");
  return {nn::gru_states(c.gru), sentence_boundary};
}

void text_backward(const TextCache& c, const TextEncoderParams& params,
                   const Mat& d_states, TextEncoderParams& grad) {
  Mat d_x;
  nn::gru_backward(c.gru, params.gru, d_states, grad.gru, &d_x);
  for (std::size_t t = 0; t < c.ids.size(); ++t) {
    grad.embedding.row(c.ids[t]) += d_x.row(static_cast<Eigen::Index>(t));
  }
}

std::vector<StyleEmbedding> tpgst_predict(const TextEncoding& text,
                                          const TpGstParams& params,
                                          TpGstCache* cache) {
  const Eigen::Index length = text.states.rows();
  if (length < 1) throw ValidationError("empty text encoding");
  if (text.states.cols() != params.hidden.weight.cols()) {
    throw ValidationError("tpgst_predict: text state width mismatch");
  }
  TpGstCache local;
  TpGstCache& c = cache ? *cache : local;
  c.parts.clear();
  c.rows = length;
  if (text.sentence_boundary) {
    const Eigen::Index b = *text.sentence_boundary;
    if (b < 1 || b > length - 1) {
      throw ValidationError("sentence boundary " + std::to_string(b) +
                            " outside [1, " + std::to_string(length - 1) + "]");
    }
    c.parts.push_back({0, b, {}, {}});
    c.parts.push_back({b, length, {}, {}});
  } else {
    c.parts.push_back({0, length, {}, {}});
  }
  std::vector<StyleEmbedding> out;
  for (auto& part : c.parts) {
    part.pooled =
        text.states.middleRows(part.begin, part.end - part.begin).colwise().mean().transpose();
    part.hidden = (params.hidden.weight * part.pooled + params.hidden.bias)
                      .array()
                      .tanh()
                      .matrix();
    StyleEmbedding e;
    e.source = StyleSource::kTpGst;
    e.vector = params.output.weight * part.hidden + params.output.bias;
    check_finite(e.vector, "tpgst output");
    out.push_back(std::move(e));
  }
  return out;
}

void tpgst_backward(const TpGstCache& c, const TpGstParams& params,
                    std::span<const Vec> d_embeddings, TpGstParams& grad,
                    Mat* d_states) {
  if (d_embeddings.size() != c.parts.size()) {
    throw ValidationError("tpgst_backward: gradient count mismatch");
  }
  if (d_states) *d_states = Mat::Zero(c.rows, params.hidden.weight.cols());
  for (std::size_t i = 0; i < c.parts.size(); ++i) {
    const auto& part = c.parts[i];
    const Vec& d_out = d_embeddings[i];
    grad.output.weight.noalias() += d_out * part.hidden.transpose();
    grad.output.bias += d_out;
    const Vec d_pre = ((params.output.weight.transpose() * d_out).array() *
                       (1.0 - part.hidden.array().square()))
                          .matrix();
    grad.hidden.weight.noalias() += d_pre * part.pooled.transpose();
    grad.hidden.bias += d_pre;
    if (d_states) {
      const Vec d_pooled = params.hidden.weight.transpose() * d_pre /
                           static_cast<double>(part.end - part.begin);
      d_states->middleRows(part.begin, part.end - part.begin).rowwise() +=
          d_pooled.transpose();
    }
  }
}

// ---------------------------------------------------------------------------

StyleModel make_style_model(const StyleConfig& config, std::uint64_t seed) {
  return {config, init_style_params(config, seed)};
}

StyleEmbedding extract_gst_embedding(const StyleModel& model,
                                     const MelSpectrogram& mel) {
  const Vec query = reference_encode(normalize_mel_for_encoder(mel),
                                     model.params.reference, model.config);
  return gst_attend(query, model.params.gst).embedding;
}

std::vector<StyleEmbedding> predict_tpgst_embeddings(
    const StyleModel& model, std::string_view text,
    std::optional<Eigen::Index> sentence_boundary) {
  return tpgst_predict(encode_text(text, sentence_boundary, model.params.text),
                       model.params.tpgst);
}

}  // namespace storystyle
