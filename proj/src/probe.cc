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

#include "storystyle/probe.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "storystyle/error.h"
#include "storystyle/rng.h"

namespace storystyle {

StratifiedSplit stratified_split(std::span<const int> labels,
                                 double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test_fraction must lie in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  StratifiedSplit split;
  for (auto& [label, members] : by_class) {
    const std::size_t n = members.size();
    if (n < 2) {
      throw ValidationError("class " + std::to_string(label) +
                            " has fewer than 2 samples");
    }
    auto n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    rng.shuffle(members);
    split.test.insert(split.test.end(), members.begin(), members.begin() + n_test);
    split.train.insert(split.train.end(), members.begin() + n_test, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

LinearProbe::LinearProbe(const Eigen::MatrixXd& features,
                         std::span<const int> labels, int n_classes,
                         const ProbeOptions& options) {
  const auto n = features.rows();
  const auto d = features.cols();
  mean_ = features.colwise().mean().transpose();
  inv_scale_.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double var =
        (features.col(j).array() - mean_(j)).square().sum() / static_cast<double>(n);
    inv_scale_(j) = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
  }
  Eigen::MatrixXd x =
      (features.rowwise() - mean_.transpose()) * inv_scale_.asDiagonal();

  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, n_classes);
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, labels[i]) = 1.0;

  weights_ = Eigen::MatrixXd::Zero(n_classes, d);
  bias_ = Eigen::VectorXd::Zero(n_classes);
  const double inv_n = 1.0 / static_cast<double>(n);
  // Softmax cross-entropy curvature is bounded by half the top eigenvalue of
  // the feature second-moment matrix.
  const Eigen::MatrixXd gram = x.transpose() * x * inv_n;
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                         gram, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
  const double step = options.step_scale / (0.5 * std::max(top, 1.0) + options.l2);
  for (int it = 0; it < options.iterations; ++it) {
    Eigen::MatrixXd logits = (x * weights_.transpose()).rowwise() + bias_.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = logits.row(i).maxCoeff();
      logits.row(i) = (logits.row(i).array() - m).exp();
      logits.row(i) /= logits.row(i).sum();
    }
    const Eigen::MatrixXd residual = (logits - onehot) * inv_n;
    const Eigen::MatrixXd grad_w = residual.transpose() * x + options.l2 * weights_;
    const Eigen::VectorXd grad_b = residual.colwise().sum().transpose();
    weights_ -= step * grad_w;
    bias_ -= step * grad_b;
  }
}

int LinearProbe::predict(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = (x - mean_).cwiseProduct(inv_scale_);
  const Eigen::VectorXd scores = weights_ * z + bias_;
  Eigen::Index best = 0;
  scores.maxCoeff(&best);
  return static_cast<int>(best);
}

ProbeResult linear_probe(std::span<const Eigen::VectorXd> embeddings,
                         std::span<const int> labels, std::uint64_t seed,
                         const ProbeOptions& options) {
  if (embeddings.size() != labels.size()) {
    throw ValidationError("probe: " + std::to_string(embeddings.size()) +
                          " embeddings but " + std::to_string(labels.size()) +
                          " labels");
  }
  if (embeddings.size() < 8) {
    throw ValidationError("probe needs at least 8 samples, got " +
                          std::to_string(embeddings.size()));
  }
  if (options.repeats < 1) throw ValidationError("probe repeats must be positive");
  const auto dim = embeddings.front().size();
  if (dim == 0) throw ValidationError("probe: empty embeddings");
  for (const auto& e : embeddings) {
    if (e.size() != dim) throw ValidationError("probe: inconsistent embedding sizes");
    if (!e.allFinite()) throw NumericError("probe: non-finite embedding");
  }

  // Dense class ids in ascending label order.
  std::map<int, int> dense;
  for (int l : labels) dense.emplace(l, 0);
  if (dense.size() < 2) throw ValidationError("probe needs at least 2 classes");
  int next = 0;
  for (auto& [l, id] : dense) id = next++;
  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[i] = dense[labels[i]];

  ProbeResult result;
  result.seed = seed;
  result.n_classes = dense.size();
  for (int r = 0; r < options.repeats; ++r) {
    const auto split = stratified_split(
        y, options.test_fraction, derive_seed(seed, static_cast<std::uint64_t>(r)));
    Eigen::MatrixXd train(static_cast<Eigen::Index>(split.train.size()), dim);
    std::vector<int> train_y(split.train.size());
    for (std::size_t i = 0; i < split.train.size(); ++i) {
      train.row(static_cast<Eigen::Index>(i)) = embeddings[split.train[i]].transpose();
      train_y[i] = y[split.train[i]];
    }
    const LinearProbe probe(train, train_y, static_cast<int>(dense.size()), options);
    std::size_t correct = 0;
    for (std::size_t idx : split.test) {
      if (probe.predict(embeddings[idx]) == y[idx]) ++correct;
    }
    result.n_test = split.test.size();
    result.per_run.push_back(static_cast<double>(correct) /
                             static_cast<double>(split.test.size()));
  }
  double sum = 0.0;
  for (double a : result.per_run) sum += a;
  result.mean_accuracy = sum / static_cast<double>(result.per_run.size());
  return result;
}

ProbeResult emotion_probe(std::span<const Eigen::VectorXd> embeddings,
                          std::span<const Emotion> labels, std::uint64_t seed,
                          const ProbeOptions& options) {
  std::vector<int> ids;
  ids.reserve(labels.size());
  for (Emotion e : labels) ids.push_back(static_cast<int>(e));
  return linear_probe(embeddings, ids, seed, options);
}

}  // namespace storystyle
