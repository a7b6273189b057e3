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

#ifndef STORYSTYLE_NN_H_
#define STORYSTYLE_NN_H_

#include <vector>

#include <Eigen/Dense>

namespace storystyle::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Channels of a 2-D feature map, each [time x frequency].
using FeatureMap = std::vector<Mat>;

struct ConvGeometry {
  int kernel = 3;
  int stride = 2;
  int padding = 1;

  int output_size(int input_size) const {
    return (input_size + 2 * padding - kernel) / stride + 1;
  }
};

// weight: [out_channels x (in_channels * kernel * kernel)], column index
// (c * kernel + u) * kernel + v for input channel c and tap (u, v).
struct Conv2dParams {
  Mat weight;
  Vec bias;
};

// Pre-activation output.
FeatureMap conv2d_forward(const FeatureMap& input, const Conv2dParams& p,
                          const ConvGeometry& g);

// Accumulates into grad; writes d_input when non-null.
void conv2d_backward(const FeatureMap& input, const FeatureMap& d_output,
                     const Conv2dParams& p, const ConvGeometry& g,
                     Conv2dParams& grad, FeatureMap* d_input);

// Gate blocks are stacked [reset; update; candidate] along the rows:
// w_input [3H x D], w_hidden [3H x H], biases [3H].
struct GruParams {
  Mat w_input;
  Mat w_hidden;
  Vec b_input;
  Vec b_hidden;

  Eigen::Index hidden_size() const { return w_hidden.cols(); }
};

// Per-step activations kept for backpropagation. Rows are time steps;
// `h` has an extra leading row holding the zero initial state.
struct GruCache {
  Mat x;
  Mat h;
  Mat r;
  Mat z;
  Mat n;
  Mat hidden_candidate;  // w_hidden_n * h_prev + b_hidden_n
};

//   r = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
//   z = sigmoid(W_iz x + b_iz + W_hz h + b_hz)
//   n = tanh(W_in x + b_in + r * (W_hn h + b_hn))
//   h' = (1 - z) * n + z * h
GruCache gru_forward(const Mat& x, const GruParams& p);

// States h_1..h_T as a [T x H] matrix.
inline Mat gru_states(const GruCache& c) {
  return c.h.bottomRows(c.h.rows() - 1);
}

// d_states is [T x H], the loss gradient with respect to each emitted state.
void gru_backward(const GruCache& c, const GruParams& p, const Mat& d_states,
                  GruParams& grad, Mat* d_x);

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace storystyle::nn

#endif  // STORYSTYLE_NN_H_
