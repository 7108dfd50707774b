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


#include "doctest.h"
#include "dsn/numerics.hpp"
#include "dsn/vrouge.hpp"

using namespace dsn;

namespace {

// item 0 = {w1: 1}, item 1 = {w1: 2, w2: 2}, item 2 = {w3: 5}
const std::vector<WordHistogram> kHist = {{{1, 1}}, {{1, 2}, {2, 2}}, {{3, 5}}};

}  // namespace

TEST_CASE("raw recall") {
  CHECK(raw_vrouge({0}, {{1}}, kHist) == doctest::Approx(0.25));
  CHECK(raw_vrouge({1}, {{1}}, kHist) == 1.0);
  CHECK(raw_vrouge({2}, {{1}}, kHist) == 0.0);
  CHECK(raw_vrouge({}, {{1}}, kHist) == 0.0);
  // averaged over references
  CHECK(raw_vrouge({0}, {{1}, {0}}, kHist) == doctest::Approx(0.625));
  const VRougeScorer scorer({{1}}, kHist);
  CHECK(scorer.raw({0}) == doctest::Approx(0.25));
}

TEST_CASE("training loss") {
  CHECK(training_loss({1}, {{1}}, kHist) == 0.0);
  CHECK(training_loss({2}, {{1}}, kHist) == 1.0);
  CHECK(training_loss({0}, {{1}}, kHist) == doctest::Approx(0.75));
}

TEST_CASE("incremental cache gains") {
  const VRougeScorer scorer({{1, 2}, {0}}, kHist);
  VRougeScorer::Cache cache(scorer);
  ItemSet a;
  for (std::size_t v : {2u, 0u, 1u}) {
    ItemSet b = a;
    b.push_back(v);
    std::sort(b.begin(), b.end());
    CHECK(cache.gain(v) == doctest::Approx(scorer.raw(b) - scorer.raw(a)));
    cache.insert(v);
    a = b;
  }
}

TEST_CASE("normalization constants") {
  const VRougeScorer scorer({{1}}, kHist);
  // the references themselves as the sample: random = human, degenerate
  const NormConstants refs = norm_constants_from_sets(scorer, {{1}});
  CHECK(refs.r_random == refs.r_human);
  CHECK(refs.degenerate());

  const NormConstants a = norm_constants(scorer, 1, 200, 5);
  const NormConstants b = norm_constants(scorer, 1, 200, 5);
  CHECK(a.r_random == b.r_random);
  CHECK(a.r_human == 1.0);
  CHECK(!a.degenerate());

  NormConstants c;
  c.r_random = 0.2;
  c.r_human = 0.6;
  CHECK(normalized_vrouge(0.6, c) == doctest::Approx(1.0));
  CHECK(normalized_vrouge(0.2, c) == doctest::Approx(0.0));
  CHECK(normalized_vrouge(0.4, c) == doctest::Approx(0.5));
}

TEST_CASE("random subsets are k-subsets and seeded") {
  SeededRng r1(8), r2(8);
  const auto s1 = sample_subsets(10, 3, 50, r1);
  CHECK(s1 == sample_subsets(10, 3, 50, r2));
  for (const auto& s : s1) {
    CHECK(s.size() == 3);
    ItemSet sorted = s;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (std::size_t v : s) CHECK(v < 10);
  }
}
