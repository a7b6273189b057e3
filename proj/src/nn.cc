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

#include "storystyle/nn.h"

#include "storystyle/error.h"

namespace storystyle::nn {

FeatureMap conv2d_forward(const FeatureMap& input, const Conv2dParams& p,
                          const ConvGeometry& g) {
  const int in_ch = static_cast<int>(input.size());
  const int k = g.kernel;
  if (p.weight.cols() != in_ch * k * k || p.bias.size() != p.weight.rows()) {
    throw ValidationError("conv2d: weight shape does not match input channels");
  }
  const int h = static_cast<int>(input[0].rows());
  const int w = static_cast<int>(input[0].cols());
  const int oh = g.output_size(h);
  const int ow = g.output_size(w);
  if (oh < 1 || ow < 1) throw ValidationError("conv2d: input too small");
  const int out_ch = static_cast<int>(p.weight.rows());

  FeatureMap out(out_ch);
  for (int o = 0; o < out_ch; ++o) out[o] = Mat::Constant(oh, ow, p.bias[o]);
  for (int c = 0; c < in_ch; ++c) {
    const Mat& in = input[c];
    for (int u = 0; u < k; ++u) {
      for (int v = 0; v < k; ++v) {
        const int col = (c * k + u) * k + v;
        for (int i = 0; i < oh; ++i) {
          const int y = i * g.stride - g.padding + u;
          if (y < 0 || y >= h) continue;
          for (int j = 0; j < ow; ++j) {
            const int x = j * g.stride - g.padding + v;
            if (x < 0 || x >= w) continue;
            const double value = in(y, x);
            for (int o = 0; o < out_ch; ++o) {
              out[o](i, j) += p.weight(o, col) * value;
            }
          }
        }
      }
    }
  }
  return out;
}

void conv2d_backward(const FeatureMap& input, const FeatureMap& d_output,
                     const Conv2dParams& p, const ConvGeometry& g,
                     Conv2dParams& grad, FeatureMap* d_input) {
  const int in_ch = static_cast<int>(input.size());
  const int out_ch = static_cast<int>(p.weight.rows());
  const int k = g.kernel;
  const int h = static_cast<int>(input[0].rows());
  const int w = static_cast<int>(input[0].cols());
  const int oh = static_cast<int>(d_output[0].rows());
  const int ow = static_cast<int>(d_output[0].cols());

  for (int o = 0; o < out_ch; ++o) grad.bias[o] += d_output[o].sum();
  if (d_input) {
    d_input->assign(in_ch, Mat::Zero(h, w));
  }
  for (int c = 0; c < in_ch; ++c) {
    const Mat& in = input[c];
    for (int u = 0; u < k; ++u) {
      for (int v = 0; v < k; ++v) {
        const int col = (c * k + u) * k + v;
        for (int i = 0; i < oh; ++i) {
          const int y = i * g.stride - g.padding + u;
          if (y < 0 || y >= h) continue;
          for (int j = 0; j < ow; ++j) {
            const int x = j * g.stride - g.padding + v;
            if (x < 0 || x >= w) continue;
            const double value = in(y, x);
            double back = 0.0;
            for (int o = 0; o < out_ch; ++o) {
              const double d = d_output[o](i, j);
              grad.weight(o, col) += d * value;
              back += p.weight(o, col) * d;
            }
            if (d_input) (*d_input)[c](y, x) += back;
          }
        }
      }
    }
  }
}

GruCache gru_forward(const Mat& x, const GruParams& p) {
  const Eigen::Index steps = x.rows();
  const Eigen::Index hs = p.hidden_size();
  if (p.w_input.cols() != x.cols() || p.w_input.rows() != 3 * hs) {
    throw ValidationError("gru: input width does not match w_input");
  }
  GruCache c;
  c.x = x;
  c.h = Mat::Zero(steps + 1, hs);
  c.r.resize(steps, hs);
  c.z.resize(steps, hs);
  c.n.resize(steps, hs);
  c.hidden_candidate.resize(steps, hs);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const Vec h_prev = c.h.row(t).transpose();
    const Vec gi = p.w_input * x.row(t).transpose() + p.b_input;
    const Vec gh = p.w_hidden * h_prev + p.b_hidden;
    for (Eigen::Index j = 0; j < hs; ++j) {
      const double r = sigmoid(gi[j] + gh[j]);
      const double z = sigmoid(gi[hs + j] + gh[hs + j]);
      const double n = std::tanh(gi[2 * hs + j] + r * gh[2 * hs + j]);
      c.r(t, j) = r;
      c.z(t, j) = z;
      c.n(t, j) = n;
      c.hidden_candidate(t, j) = gh[2 * hs + j];
      c.h(t + 1, j) = (1.0 - z) * n + z * h_prev[j];
    }
  }
  return c;
}

void gru_backward(const GruCache& c, const GruParams& p, const Mat& d_states,
                  GruParams& grad, Mat* d_x) {
  const Eigen::Index steps = c.x.rows();
  const Eigen::Index hs = p.hidden_size();
  if (d_x) *d_x = Mat::Zero(steps, c.x.cols());
  Vec dh_next = Vec::Zero(hs);
  Vec d_gi(3 * hs), d_gh(3 * hs);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Vec dh = dh_next + d_states.row(t).transpose();
    const auto h_prev = c.h.row(t);
    Vec dh_prev = Vec::Zero(hs);
    for (Eigen::Index j = 0; j < hs; ++j) {
      const double r = c.r(t, j), z = c.z(t, j), n = c.n(t, j);
      const double dn = dh[j] * (1.0 - z);
      const double dz = dh[j] * (h_prev[j] - n);
      dh_prev[j] = dh[j] * z;
      const double dn_pre = dn * (1.0 - n * n);
      const double dr = dn_pre * c.hidden_candidate(t, j);
      const double dr_pre = dr * r * (1.0 - r);
      const double dz_pre = dz * z * (1.0 - z);
      d_gi[j] = dr_pre;
      d_gi[hs + j] = dz_pre;
      d_gi[2 * hs + j] = dn_pre;
      d_gh[j] = dr_pre;
      d_gh[hs + j] = dz_pre;
      d_gh[2 * hs + j] = dn_pre * r;
    }
    grad.w_input.noalias() += d_gi * c.x.row(t);
    grad.b_input += d_gi;
    grad.w_hidden.noalias() += d_gh * h_prev;
    grad.b_hidden += d_gh;
    dh_prev.noalias() += p.w_hidden.transpose() * d_gh;
    if (d_x) d_x->row(t).noalias() += (p.w_input.transpose() * d_gi).transpose();
    dh_next = dh_prev;
  }
}

}  // namespace storystyle::nn
