// Copyright 2026 The Authors.
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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "dsn/error.hpp"
#include "dsn/numerics.hpp"

using namespace dsn;

TEST_CASE("sigmoid reference values") {
  CHECK(sigmoid(0.0) == 0.5);
  // 1 / (1 + e^-1) to 16 digits
  CHECK(sigmoid(1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
  CHECK(sigmoid(-1.0) == doctest::Approx(1.0 - 0.7310585786300049).epsilon(1e-15));
  const std::vector<double> in = {-800.0, 0.0, 800.0};
  const auto out = sigmoid(in);
  CHECK(out[0] >= 0.0);
  CHECK(out[1] == 0.5);
  CHECK(out[2] <= 1.0);
  for (double v : out) CHECK(std::isfinite(v));
}

TEST_CASE("xavier bounds, determinism, zero dims") {
  SeededRng a(3), b(3);
  const Matrix m = xavier_init(a, 1, 5);
  for (double x : m.data()) CHECK(std::abs(x) <= 1.0);
  CHECK(m == xavier_init(b, 1, 5));

  SeededRng rng(11);
  const Matrix big = xavier_init(rng, 40, 60);
  const double bound = std::sqrt(6.0 / 100.0);
  double sum = 0.0, sq = 0.0;
  for (double x : big.data()) {
    CHECK(std::abs(x) <= bound);
    sum += x;
    sq += x * x;
  }
  const double n = static_cast<double>(big.size());
  // uniform(-b, b): mean 0, variance b^2 / 3 = 2 / (rows + cols)
  CHECK(std::abs(sum / n) < 4.0 * bound / std::sqrt(3.0 * n));
  CHECK(sq / n == doctest::Approx(2.0 / 100.0).epsilon(0.05));

  CHECK_THROWS_AS(xavier_init(rng, 0, 3), Error);
}

TEST_CASE("adam: zero grads, first step, decay") {
  std::vector<double> p = {1.0, -2.0};
  const std::vector<double> zero = {0.0, 0.0};
  AdamState st(2, 0.01, 0.0);
  adam_step(st, p, zero, 0);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == -2.0);

  // first bias-corrected step moves each coordinate by ~lr0 against the sign
  AdamState st2(2, 0.01, 0.0);
  std::vector<double> q = {0.0, 0.0};
  const std::vector<double> g = {3.0, -0.5};
  adam_step(st2, q, g, 0);
  CHECK(q[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(q[1] == doctest::Approx(0.01).epsilon(1e-6));

  AdamState flat(1, 0.05, 0.0);
  for (std::size_t e : {0u, 1u, 10u, 1000u}) CHECK(flat.learning_rate(e) == 0.05);
  AdamState decayed(1, 0.05, 0.1);
  CHECK(decayed.learning_rate(0) == 0.05);
  CHECK(decayed.learning_rate(10) == doctest::Approx(0.025));

  Matrix mp(2, 2), mg(3, 2);
  AdamState sm(4, 0.01, 0.0);
  CHECK_THROWS_AS(adam_step(sm, mp, mg, 0), Error);
}

TEST_CASE("seeded rng determinism") {
  SeededRng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  SeededRng c(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(c.below(7) < 7);
  }
}
