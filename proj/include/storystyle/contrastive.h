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

#ifndef STORYSTYLE_CONTRASTIVE_H_
#define STORYSTYLE_CONTRASTIVE_H_

#include <Eigen/Dense>

namespace storystyle {

inline constexpr double kDefaultTemperature = 0.5;

// 2N views, one per row. Rows 2k and 2k+1 are the two views of sample k.
struct ContrastiveBatch {
  Eigen::MatrixXd views;
  double temperature = kDefaultTemperature;
};

// Normalized-temperature cross entropy. With cosine similarity s and
// positive p(i):
//
//   l_i = -log( exp(s(i,p(i))/t) / sum_{k != i} exp(s(i,k)/t) )
//
// averaged over all 2N views. Throws ValidationError for fewer than 4 views,
// an odd count or t <= 0, and NumericError for a zero-norm view.
double nt_xent_loss(const ContrastiveBatch& batch);

// Same loss; writes dLoss/dviews into grad (same shape as views).
double nt_xent_loss(const ContrastiveBatch& batch, Eigen::MatrixXd* grad);

}  // namespace storystyle

#endif  // STORYSTYLE_CONTRASTIVE_H_
