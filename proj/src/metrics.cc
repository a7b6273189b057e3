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

#include "storystyle/metrics.h"

#include <cmath>

#include "storystyle/error.h"
#include "storystyle/text_util.h"

namespace storystyle {

double tpgst_l1(const Eigen::VectorXd& predicted, const Eigen::VectorXd& target) {
  if (predicted.size() != target.size()) {
    throw ValidationError("tpgst_l1: dimension " + std::to_string(predicted.size()) +
                          " vs " + std::to_string(target.size()));
  }
  if (predicted.size() == 0) throw ValidationError("tpgst_l1: empty embeddings");
  return (predicted - target).cwiseAbs().sum() / static_cast<double>(predicted.size());
}

std::string format_metric_line(std::string_view metric, double value, std::size_t n,
                               std::optional<std::uint64_t> seed) {
  std::string line(metric);
  line += '\t';
  line += format_double(value);
  line += '\t';
  line += std::to_string(n);
  line += '\t';
  line += seed ? std::to_string(*seed) : "-";
  line += '\n';
  return line;
}

PauseComparison compare_pause_distributions(std::span<const double> synth_pauses,
                                            std::span<const double> ground_truth_pauses,
                                            std::string_view label) {
  PauseComparison out;
  out.ks = ks_two_sample(synth_pauses, ground_truth_pauses);
  if (out.ks.statistic == 0.0) {
    out.verdict = "indistinguishable";
  } else if (out.ks.p_value < 0.05) {
    out.verdict = "different";
  } else {
    out.verdict = "consistent";
  }
  const std::string name(label);
  out.report = "pause distribution (" + name + " vs ground truth)\n" +
               "  n_" + name + " = " + std::to_string(out.ks.n1) + "\n" +
               "  n_ground_truth = " + std::to_string(out.ks.n2) + "\n" +
               "  ks_statistic = " + format_fixed(out.ks.statistic, 6) + "\n" +
               "  p_value = " + format_fixed(out.ks.p_value, 6) + "\n" +
               "  verdict = " + out.verdict + "\n";
  const std::size_t n = out.ks.n1 + out.ks.n2;
  out.machine_lines = format_metric_line("ks_statistic", out.ks.statistic, n) +
                      format_metric_line("ks_p_value", out.ks.p_value, n);
  return out;
}

std::string closer_to_ground_truth(std::string_view name_a, const KsResult& a,
                                   std::string_view name_b, const KsResult& b) {
  const bool a_wins = a.statistic <= b.statistic;
  std::string line(a_wins ? name_a : name_b);
  line += " is closer to ground truth (D = ";
  line += format_fixed(a_wins ? a.statistic : b.statistic, 6);
  line += " vs ";
  line += format_fixed(a_wins ? b.statistic : a.statistic, 6);
  line += ")\n";
  return line;
}

}  // namespace storystyle
