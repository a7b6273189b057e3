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

#include "storystyle/rng.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"

namespace ss = storystyle;

TEST_CASE("same seed gives the same stream") {
  ss::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform stays in [0, 1) and has the right mean") {
  ss::Rng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // SE of the mean is sqrt(1/12/n) ~ 6.5e-4.
  CHECK(std::abs(sum / n - 0.5) < 4e-3);
}

TEST_CASE("uniform_index covers its range without bias") {
  ss::Rng rng(7);
  std::vector<int> counts(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.uniform_index(6);
    REQUIRE(k < 6);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - n / 6) < 500);
}

TEST_CASE("normal draws have unit variance") {
  ss::Rng rng(3);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(sq / n - mean * mean - 1.0) < 0.02);
}

TEST_CASE("shuffle is a permutation") {
  ss::Rng rng(9);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  rng.shuffle(w);
  CHECK(w != v);
  std::sort(w.begin(), w.end());
  CHECK(w == v);
}

TEST_CASE("derived seeds separate stages and indices") {
  std::set<std::uint64_t> seen;
  for (const char* stage : {"augment.pairs", "augment.pause", "style.init", "style.train",
                            "eval.probe"}) {
    CHECK(seen.insert(ss::derive_seed(std::uint64_t{5}, stage)).second);
  }
  for (std::uint64_t i = 0; i < 100; ++i) {
    CHECK(seen.insert(ss::derive_seed(std::uint64_t{5}, i)).second);
  }
  CHECK(ss::derive_seed(std::uint64_t{5}, "style.init") ==
        ss::derive_seed(std::uint64_t{5}, "style.init"));
  CHECK(ss::derive_seed(std::uint64_t{5}, "style.init") !=
        ss::derive_seed(std::uint64_t{6}, "style.init"));
}

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(ss::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(ss::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(ss::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
