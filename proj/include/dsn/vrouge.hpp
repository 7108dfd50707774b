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

// V-ROUGE: recall of reference visual-word counts by a summary, averaged over
// the reference summaries,
//
//   r(A) = 1/M sum_m sum_w min(c_A(w), c_Ym(w)) / sum_w c_Ym(w),
//
// plus the affine normalization that maps the mean of random k-subsets to 0
// and the mean of the reference summaries to 1.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "dsn/component.hpp"
#include "dsn/numerics.hpp"

namespace dsn {

using WordHistogram = std::map<std::int64_t, std::int64_t>;

class VRougeScorer {
 public:
  VRougeScorer(std::vector<ItemSet> references, std::vector<WordHistogram> histograms);

  std::size_t ground_size() const { return item_words_.size(); }
  const std::vector<ItemSet>& references() const { return references_; }

  double raw(const ItemSet& set) const;
  double loss(const ItemSet& set) const { return 1.0 - raw(set); }

  // Incremental recall for greedy.
  class Cache {
   public:
    explicit Cache(const VRougeScorer& scorer);
    double gain(std::size_t v) const;
    void insert(std::size_t v);

   private:
    const VRougeScorer* scorer_;
    std::vector<std::int64_t> counts_;  // dense c_A(w)
  };

 private:
  friend class Cache;
  std::vector<ItemSet> references_;
  // Sparse (dense word index, count) pairs per item.
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> item_words_;
  std::vector<std::vector<std::int64_t>> ref_counts_;  // dense per reference
  std::vector<double> ref_totals_;
  std::size_t vocab_ = 0;
};

double raw_vrouge(const ItemSet& set, const std::vector<ItemSet>& references,
                  const std::vector<WordHistogram>& histograms);
double training_loss(const ItemSet& set, const std::vector<ItemSet>& references,
                     const std::vector<WordHistogram>& histograms);

struct NormConstants {
  double r_random = 0.0;
  double r_human = 1.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t budget = 0;

  bool degenerate() const { return !(r_human > r_random); }
};

inline constexpr std::size_t kDefaultNormSamples = 1000;
inline constexpr std::uint64_t kDefaultNormSeed = 20201;

// `samples` uniform k-subsets of {0..n-1}, drawn sequentially from rng.
std::vector<ItemSet> sample_subsets(std::size_t n, std::size_t k, std::size_t samples,
                                    SeededRng& rng);

// Means over explicit sets; never throws on degeneracy.
NormConstants norm_constants_from_sets(const VRougeScorer& scorer,
                                       const std::vector<ItemSet>& random_sets);

// Seeded random baseline; throws kDegenerate when r_human <= r_random.
NormConstants norm_constants(const VRougeScorer& scorer, std::size_t k, std::size_t samples,
                             std::uint64_t seed);

double normalized_vrouge(double raw, const NormConstants& constants);
double normalized_vrouge(const ItemSet& set, const NormConstants& constants,
                         const VRougeScorer& scorer);

}  // namespace dsn
