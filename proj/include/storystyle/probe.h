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

#ifndef STORYSTYLE_PROBE_H_
#define STORYSTYLE_PROBE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "storystyle/emotion.h"

namespace storystyle {

struct ProbeOptions {
  double test_fraction = 0.25;
  int repeats = 50;
  // Multinomial logistic regression on standardized features.
  double l2 = 1e-3;
  int iterations = 300;
  // Step size as a fraction of 1/L, L the gradient's Lipschitz bound.
  double step_scale = 1.0;
};

struct ProbeResult {
  double mean_accuracy = 0.0;
  std::vector<double> per_run;
  std::uint64_t seed = 0;
  std::size_t n_test = 0;    // test-set size of every repeat
  std::size_t n_classes = 0;
};

struct StratifiedSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per class, round(count * test_fraction) members go to the test set,
// clamped so each class keeps at least one sample on both sides. Classes are
// visited in ascending label order, members in index order before shuffling.
StratifiedSplit stratified_split(std::span<const int> labels,
                                 double test_fraction, std::uint64_t seed);

// Linear classifier fitted on rows of `features`. Deterministic: zero
// initialization and full-batch gradient descent for a fixed number of
// iterations.
class LinearProbe {
 public:
  LinearProbe(const Eigen::MatrixXd& features, std::span<const int> labels,
              int n_classes, const ProbeOptions& options);
  int predict(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd inv_scale_;
  Eigen::MatrixXd weights_;  // [n_classes x dim]
  Eigen::VectorXd bias_;
};

// Repeated stratified hold-out evaluation of a linear classifier predicting
// emotion from style embeddings. Repeat r uses derive_seed(seed, r). Throws
// ValidationError with fewer than 8 samples, fewer than 2 classes, a class
// with a single member, mismatched sizes or inconsistent dimensions.
ProbeResult emotion_probe(std::span<const Eigen::VectorXd> embeddings,
                          std::span<const Emotion> labels, std::uint64_t seed,
                          const ProbeOptions& options = {});

// Same protocol over arbitrary integer class ids.
ProbeResult linear_probe(std::span<const Eigen::VectorXd> embeddings,
                         std::span<const int> labels, std::uint64_t seed,
                         const ProbeOptions& options = {});

}  // namespace storystyle

#endif  // STORYSTYLE_PROBE_H_
