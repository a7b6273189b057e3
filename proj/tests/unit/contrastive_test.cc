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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "storystyle/error.h"
#include "oracles.h"
#include "test_support.h"

namespace ss = storystyle;
using Eigen::MatrixXd;

TEST_CASE("orthogonal pairs example") {
  MatrixXd v(4, 2);
  v << 1, 0, 1, 0, 0, 1, 0, 1;
  const double expected = -std::log(std::exp(2.0) / (std::exp(2.0) + 2.0));
  CHECK(std::abs(ss::nt_xent_loss({v, 0.5}) - expected) <= 1e-12);
}

TEST_CASE("identical views give log(2N - 1)") {
  ss::Rng rng(1);
  for (int n = 2; n <= 8; ++n) {
    const Eigen::RowVectorXd row = ss::testing::random_vec(rng, 5).transpose();
    const MatrixXd v = row.replicate(2 * n, 1);
    CHECK(std::abs(ss::nt_xent_loss({v, 0.5}) - std::log(2.0 * n - 1.0)) <= 1e-10);
  }
}

TEST_CASE("matches the pairwise loop; scale and pair-order invariance") {
  ss::Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(7));
    const int d = 1 + static_cast<int>(rng.uniform_index(16));
    const double tau = 0.1 + rng.uniform();
    const MatrixXd v = ss::testing::random_mat(rng, 2 * n, d);
    const double loss = ss::nt_xent_loss({v, tau});
    CHECK(std::abs(loss - ss::oracle::nt_xent(v, tau)) <= 1e-10);
    CHECK(std::abs(ss::nt_xent_loss({v * (0.01 + 10 * rng.uniform()), tau}) - loss) <= 1e-10);

    // Reverse the pair order and swap the views inside pair 0.
    MatrixXd w(2 * n, d);
    for (int k = 0; k < n; ++k) {
      w.row(2 * k) = v.row(2 * (n - 1 - k));
      w.row(2 * k + 1) = v.row(2 * (n - 1 - k) + 1);
    }
    w.row(0).swap(w.row(1));
    CHECK(std::abs(ss::nt_xent_loss({w, tau}) - loss) <= 1e-10);
  }
}

TEST_CASE("analytic gradient matches central differences") {
  ss::Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixXd v = ss::testing::random_mat(rng, 6, 5);
    MatrixXd grad;
    ss::nt_xent_loss({v, 0.5}, &grad);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double saved = v.data()[i];
      v.data()[i] = saved + 1e-6;
      const double up = ss::nt_xent_loss({v, 0.5});
      v.data()[i] = saved - 1e-6;
      const double down = ss::nt_xent_loss({v, 0.5});
      v.data()[i] = saved;
      CHECK(grad.data()[i] == doctest::Approx((up - down) / 2e-6).epsilon(1e-5));
    }
  }
}

TEST_CASE("invalid batches") {
  CHECK_THROWS_AS(ss::nt_xent_loss({MatrixXd::Ones(2, 3), 0.5}), ss::ValidationError);
  CHECK_THROWS_AS(ss::nt_xent_loss({MatrixXd::Ones(5, 3), 0.5}), ss::ValidationError);
  CHECK_THROWS_AS(ss::nt_xent_loss({MatrixXd::Ones(4, 3), 0.0}), ss::ValidationError);
  MatrixXd z = MatrixXd::Ones(4, 3);
  z.row(2).setZero();
  CHECK_THROWS_AS(ss::nt_xent_loss({z, 0.5}), ss::NumericError);
}
