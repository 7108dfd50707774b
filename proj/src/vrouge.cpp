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

#include "dsn/vrouge.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dsn/error.hpp"

namespace dsn {

VRougeScorer::VRougeScorer(std::vector<ItemSet> references,
                           std::vector<WordHistogram> histograms)
    : references_(std::move(references)) {
  require(!references_.empty(), ErrorCode::kInvalidArgument,
          "V-ROUGE needs at least one reference summary");
  // Map word ids onto a dense index in ascending id order.
  std::map<std::int64_t, std::size_t> index;
  for (const auto& hist : histograms) {
    for (const auto& [word, count] : hist) {
      require(count >= 0, ErrorCode::kInvalidArgument, "word counts must be nonnegative");
      index.emplace(word, 0);
    }
  }
  for (auto& [word, slot] : index) slot = vocab_++;
  item_words_.resize(histograms.size());
  for (std::size_t i = 0; i < histograms.size(); ++i) {
    for (const auto& [word, count] : histograms[i]) {
      if (count > 0) item_words_[i].emplace_back(index.at(word), count);
    }
  }
  for (const auto& ref : references_) {
    validate_set(ref, histograms.size());
    std::vector<std::int64_t> counts(vocab_, 0);
    for (std::size_t v : ref) {
      for (const auto& [w, c] : item_words_[v]) counts[w] += c;
    }
    const auto total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    require(total > 0, ErrorCode::kInvalidArgument,
            "reference summary has an empty word histogram");
    ref_counts_.push_back(std::move(counts));
    ref_totals_.push_back(static_cast<double>(total));
  }
}

double VRougeScorer::raw(const ItemSet& set) const {
  validate_set(set, ground_size());
  std::vector<std::int64_t> counts(vocab_, 0);
  for (std::size_t v : set) {
    for (const auto& [w, c] : item_words_[v]) counts[w] += c;
  }
  double total = 0.0;
  for (std::size_t m = 0; m < ref_counts_.size(); ++m) {
    std::int64_t hit = 0;
    for (std::size_t w = 0; w < vocab_; ++w) hit += std::min(counts[w], ref_counts_[m][w]);
    total += static_cast<double>(hit) / ref_totals_[m];
  }
  return total / static_cast<double>(ref_counts_.size());
}

VRougeScorer::Cache::Cache(const VRougeScorer& scorer)
    : scorer_(&scorer), counts_(scorer.vocab_, 0) {}

double VRougeScorer::Cache::gain(std::size_t v) const {
  const VRougeScorer& sc = *scorer_;
  require(v < sc.ground_size(), ErrorCode::kIdOutOfRange, "V-ROUGE gain: id out of range");
  double total = 0.0;
  for (std::size_t m = 0; m < sc.ref_counts_.size(); ++m) {
    std::int64_t hit = 0;
    for (const auto& [w, c] : sc.item_words_[v]) {
      const std::int64_t cap = sc.ref_counts_[m][w];
      hit += std::min(counts_[w] + c, cap) - std::min(counts_[w], cap);
    }
    total += static_cast<double>(hit) / sc.ref_totals_[m];
  }
  return total / static_cast<double>(sc.ref_counts_.size());
}

void VRougeScorer::Cache::insert(std::size_t v) {
  for (const auto& [w, c] : scorer_->item_words_[v]) counts_[w] += c;
}

double raw_vrouge(const ItemSet& set, const std::vector<ItemSet>& references,
                  const std::vector<WordHistogram>& histograms) {
  return VRougeScorer(references, histograms).raw(set);
}

double training_loss(const ItemSet& set, const std::vector<ItemSet>& references,
                     const std::vector<WordHistogram>& histograms) {
  return 1.0 - raw_vrouge(set, references, histograms);
}

std::vector<ItemSet> sample_subsets(std::size_t n, std::size_t k, std::size_t samples,
                                    SeededRng& rng) {
  require(k >= 1 && k <= n, ErrorCode::kInvalidArgument,
          "subset size must lie in [1, n]");
  std::vector<ItemSet> sets;
  sets.reserve(samples);
  std::vector<std::size_t> pool(n);
  for (std::size_t s = 0; s < samples; ++s) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(pool[i], pool[i + rng.below(n - i)]);
    }
    sets.emplace_back(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return sets;
}

NormConstants norm_constants_from_sets(const VRougeScorer& scorer,
                                       const std::vector<ItemSet>& random_sets) {
  require(!random_sets.empty(), ErrorCode::kInvalidArgument, "need at least one sample");
  NormConstants nc;
  double sum = 0.0;
  for (const auto& set : random_sets) sum += scorer.raw(set);
  nc.r_random = sum / static_cast<double>(random_sets.size());
  double human = 0.0;
  for (const auto& ref : scorer.references()) human += scorer.raw(ref);
  nc.r_human = human / static_cast<double>(scorer.references().size());
  nc.samples = random_sets.size();
  nc.budget = random_sets.front().size();
  return nc;
}

NormConstants norm_constants(const VRougeScorer& scorer, std::size_t k, std::size_t samples,
                             std::uint64_t seed) {
  require(samples >= 1, ErrorCode::kInvalidArgument, "samples must be >= 1");
  SeededRng rng(seed);
  NormConstants nc =
      norm_constants_from_sets(scorer, sample_subsets(scorer.ground_size(), k, samples, rng));
  nc.seed = seed;
  require(!nc.degenerate(), ErrorCode::kDegenerate,
          "degenerate V-ROUGE normalization: r_human=" + std::to_string(nc.r_human) +
              " <= r_random=" + std::to_string(nc.r_random));
  return nc;
}

double normalized_vrouge(double raw, const NormConstants& c) {
  require(!c.degenerate(), ErrorCode::kDegenerate,
          "cannot normalize against degenerate constants");
  return (raw - c.r_random) / (c.r_human - c.r_random);
}

double normalized_vrouge(const ItemSet& set, const NormConstants& c,
                         const VRougeScorer& scorer) {
  return normalized_vrouge(scorer.raw(set), c);
}

}  // namespace dsn
