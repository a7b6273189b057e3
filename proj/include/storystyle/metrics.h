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

#ifndef STORYSTYLE_METRICS_H_
#define STORYSTYLE_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "storystyle/ks_test.h"

namespace storystyle {

// Mean absolute coordinate difference. Throws ValidationError on a
// dimension mismatch or empty vectors.
double tpgst_l1(const Eigen::VectorXd& predicted, const Eigen::VectorXd& target);

// `metric \t value \t n \t seed`; the seed column is "-" for unseeded metrics.
std::string format_metric_line(std::string_view metric, double value, std::size_t n,
                               std::optional<std::uint64_t> seed = std::nullopt);

struct PauseComparison {
  KsResult ks;
  // "indistinguishable" when the ECDFs coincide, else "different" when
  // p < 0.05, else "consistent".
  std::string verdict;
  std::string report;        // human-readable block
  std::string machine_lines; // ks_statistic and ks_p_value metric lines
};

PauseComparison compare_pause_distributions(std::span<const double> synth_pauses,
                                            std::span<const double> ground_truth_pauses,
                                            std::string_view label = "synth");

// Of two systems compared against the same ground truth, the one with the
// smaller K-S statistic; ties go to `a`. Returns a human-readable line.
std::string closer_to_ground_truth(std::string_view name_a, const KsResult& a,
                                   std::string_view name_b, const KsResult& b);

}  // namespace storystyle

#endif  // STORYSTYLE_METRICS_H_
