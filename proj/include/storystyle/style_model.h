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

#ifndef STORYSTYLE_STYLE_MODEL_H_
#define STORYSTYLE_STYLE_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "storystyle/mel.h"
#include "storystyle/nn.h"

namespace storystyle {

// Sizes and hyperparameters of the style subsystem.
struct StyleConfig {
  MelConfig mel;
  std::vector<int> conv_channels = {8, 16, 16};
  nn::ConvGeometry conv;
  int ref_gru_units = 32;
  int d_query = 32;
  int n_tokens = 10;
  int n_heads = 4;
  int d_token = 32;
  int d_style = 64;
  int text_vocab = 256;
  int text_embed_dim = 16;
  int text_units = 32;
  int tpgst_hidden = 32;
  double temperature = 0.5;
  double simclr_scale = 0.1;
  double conditioning_prob = 0.5;
  double mask_s = kMaskSeconds;
  double learning_rate = 0.05;

  void validate() const;
  // Frequency bins left after the conv stack.
  int encoder_output_mels() const;
};

struct DenseParams {
  nn::Mat weight;  // [out x in]
  nn::Vec bias;
};

struct ReferenceEncoderParams {
  std::vector<nn::Conv2dParams> convs;
  nn::GruParams gru;
  DenseParams projection;
};

// The style token bank plus the attention projections.
struct GstParams {
  nn::Mat tokens;  // [n_tokens x d_token]
  int n_heads = 1;
  nn::Mat w_query;  // [d_style x d_query]
  nn::Mat w_key;    // [d_style x d_token]
  nn::Mat w_value;  // [d_style x d_token]
};

struct TextEncoderParams {
  nn::Mat embedding;  // [vocab x embed_dim]
  nn::GruParams gru;
};

struct TpGstParams {
  DenseParams hidden;
  DenseParams output;
};

// Flat view of one trainable tensor (column-major storage).
struct TensorRef {
  std::string name;
  double* data = nullptr;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  Eigen::Index size() const { return rows * cols; }
  // Row-major element (i, j).
  double& at(Eigen::Index i, Eigen::Index j) const { return data[j * rows + i]; }
};

struct StyleParams {
  ReferenceEncoderParams reference;
  GstParams gst;
  TextEncoderParams text;
  TpGstParams tpgst;

  // Every trainable tensor in a fixed order. Names are prefixed "ref.",
  // "gst.", "text." or "tpgst.".
  std::vector<TensorRef> tensors();
  std::vector<TensorRef> tensors() const {
    return const_cast<StyleParams*>(this)->tensors();
  }
};

StyleParams init_style_params(const StyleConfig& config, std::uint64_t seed);
StyleParams zeros_like(const StyleParams& params);

// ---------------------------------------------------------------------------
// Reference encoder: strided conv2d + tanh stack over [T x n_mels], GRU over
// the time axis, tanh projection of the final state to d_query.

struct ReferenceCache {
  // activations[0] is the input; activations[l + 1] the tanh output of conv l.
  std::vector<nn::FeatureMap> activations;
  nn::GruCache gru;
  nn::Vec query;
};

// Throws NumericError naming the layer whose activations are non-finite.
nn::Vec reference_encode(const nn::Mat& input,
                         const ReferenceEncoderParams& params,
                         const StyleConfig& config,
                         ReferenceCache* cache = nullptr);

void reference_backward(const ReferenceCache& cache,
                        const ReferenceEncoderParams& params,
                        const StyleConfig& config, const nn::Vec& d_query,
                        ReferenceEncoderParams& grad, nn::Mat* d_input);

// Log-mel rescaled so silence maps to 0 before the reference encoder.
nn::Mat normalize_mel_for_encoder(const MelSpectrogram& mel);

// ---------------------------------------------------------------------------
// Global style token attention.

enum class StyleSource { kGst, kTpGst };

struct StyleEmbedding {
  nn::Vec vector;
  StyleSource source = StyleSource::kGst;
};

struct GstCache {
  nn::Vec query;
  nn::Mat token_act;  // tanh(tokens)
  nn::Vec projected_query;
  nn::Mat keys;    // [n_tokens x d_style]
  nn::Mat values;  // [n_tokens x d_style]
  nn::Mat weights;
};

struct GstOutput {
  nn::Mat weights;  // [n_heads x n_tokens], each row a softmax
  StyleEmbedding embedding;
};

// Per head h (a d_style / n_heads slice): logits over tokens are
// (W_q q)_h . (W_k tanh(token_t))_h / sqrt(d_head); the embedding slice is
// sum_t w_t (W_v tanh(token_t))_h.
GstOutput gst_attend(const nn::Vec& query, const GstParams& params,
                     GstCache* cache = nullptr);

void gst_backward(const GstCache& cache, const GstParams& params,
                  const nn::Vec& d_embedding, GstParams& grad,
                  nn::Vec* d_query);

// ---------------------------------------------------------------------------
// Text side: byte embedding + GRU, and the text-predicted style head.

struct TextEncoding {
  nn::Mat states;  // [L x d_text]
  // First row of the second sentence; present iff the text joins two.
  std::optional<Eigen::Index> sentence_boundary;
};

struct TextCache {
  std::vector<int> ids;
  nn::GruCache gru;
};

TextEncoding encode_text(std::string_view text,
                         std::optional<Eigen::Index> sentence_boundary,
                         const TextEncoderParams& params,
                         TextCache* cache = nullptr);

void text_backward(const TextCache& cache, const TextEncoderParams& params,
                   const nn::Mat& d_states, TextEncoderParams& grad);

struct TpGstCache {
  struct Part {
    Eigen::Index begin = 0;
    Eigen::Index end = 0;
    nn::Vec pooled;
    nn::Vec hidden;
  };
  std::vector<Part> parts;
  Eigen::Index rows = 0;
};

// Mean-pools the states (each half separately when a boundary is present)
// and maps each pool through tanh(W1 x + b1) -> W2 h + b2. Throws
// ValidationError when the boundary lies outside [1, L-1].
std::vector<StyleEmbedding> tpgst_predict(const TextEncoding& text,
                                          const TpGstParams& params,
                                          TpGstCache* cache = nullptr);

void tpgst_backward(const TpGstCache& cache, const TpGstParams& params,
                    std::span<const nn::Vec> d_embeddings, TpGstParams& grad,
                    nn::Mat* d_states);

// ---------------------------------------------------------------------------

struct StyleModel {
  StyleConfig config;
  StyleParams params;
};

StyleModel make_style_model(const StyleConfig& config, std::uint64_t seed);

// mel -> normalized -> reference encoder -> GST.
StyleEmbedding extract_gst_embedding(const StyleModel& model,
                                     const MelSpectrogram& mel);

std::vector<StyleEmbedding> predict_tpgst_embeddings(
    const StyleModel& model, std::string_view text,
    std::optional<Eigen::Index> sentence_boundary = std::nullopt);

}  // namespace storystyle

#endif  // STORYSTYLE_STYLE_MODEL_H_
