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

#include "storystyle/contrastive.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "storystyle/error.h"

namespace storystyle {

double nt_xent_loss(const ContrastiveBatch& batch) {
  return nt_xent_loss(batch, nullptr);
}

double nt_xent_loss(const ContrastiveBatch& batch, Eigen::MatrixXd* grad) {
  const Eigen::MatrixXd& v = batch.views;
  const Eigen::Index n = v.rows();
  if (n < 4 || n % 2 != 0) {
    throw ValidationError("NT-Xent needs an even number (>= 4) of views, got " +
                          std::to_string(n));
  }
  if (!(batch.temperature > 0.0)) {
    throw ValidationError("NT-Xent temperature must be > 0");
  }
  const double tau = batch.temperature;

  Eigen::VectorXd norms = v.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(norms[i] > 0.0) || !std::isfinite(norms[i])) {
      throw NumericError("NT-Xent view " + std::to_string(i) +
                         " has zero or non-finite norm");
    }
  }
  const Eigen::MatrixXd u = norms.cwiseInverse().asDiagonal() * v;
  const Eigen::MatrixXd logits = (u * u.transpose()) / tau;

  // softmax[i][k] over k != i; diagonal left at zero.
  Eigen::MatrixXd softmax = Eigen::MatrixXd::Zero(n, n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index pos = i ^ 1;
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != i) top = std::max(top, logits(i, k));
    }
    double denom = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      softmax(i, k) = std::exp(logits(i, k) - top);
      denom += softmax(i, k);
    }
    softmax.row(i) /= denom;
    loss += -(logits(i, pos) - top) + std::log(denom);
  }
  loss /= static_cast<double>(n);

  if (grad) {
    // dL/dlogit(i,k) = (softmax(i,k) - [k == p(i)]) / n; the logit matrix is
    // symmetric in (i, k), so both orientations feed dL/du.
    Eigen::MatrixXd g = softmax;
    for (Eigen::Index i = 0; i < n; ++i) g(i, i ^ 1) -= 1.0;
    g /= static_cast<double>(n);
    const Eigen::MatrixXd du = (g + g.transpose()) * u / tau;
    grad->resize(n, v.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double along = u.row(i).dot(du.row(i));
      grad->row(i) = (du.row(i) - along * u.row(i)) / norms[i];
    }
  }
  return loss;
}

}  // namespace storystyle
