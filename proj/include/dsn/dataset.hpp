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

// Collections on disk and in memory.
//
// collection.json:
//   { "name": ..., "dim": d,
//     "features": [[...], ...]            (or "features_csv": "relative.csv"),
//     "word_counts": [{"<word id>": count, ...}, ...],
//     "summaries": [[ids], ...],
//     "queries": [{"label": ..., "features": [[...]], "summaries": [[ids]]}],
//     "vrouge_norm": {"r_random", "r_human", "samples", "seed", "budget"} }
//
// A dataset directory holds manifest.json: {"collections": ["file.json", ...]}.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsn/component.hpp"
#include "dsn/numerics.hpp"
#include "dsn/vrouge.hpp"

namespace dsn {

struct Item {
  std::size_t id = 0;
  std::vector<double> raw_features;
  WordHistogram word_counts;
};

struct QuerySet {
  std::string label;
  Matrix features;                 // rows are query vectors
  std::vector<ItemSet> summaries;  // reference summaries for this query
};

struct Collection {
  std::string name;
  std::size_t dim = 0;
  std::vector<Item> items;
  std::vector<ItemSet> reference_summaries;
  std::vector<QuerySet> queries;
  std::optional<NormConstants> vrouge_norm;

  std::size_t size() const { return items.size(); }
  Matrix feature_matrix() const;
  std::vector<WordHistogram> histograms() const;
  void validate() const;
};

nlohmann::json collection_to_json(const Collection& c);
// base_dir resolves features_csv.
Collection collection_from_json(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir = {});

Collection load_collection(const std::filesystem::path& path);
void save_collection(const Collection& c, const std::filesystem::path& path);

std::vector<Collection> load_dataset(const std::filesystem::path& dir);
void save_dataset(const std::vector<Collection>& collections, const std::filesystem::path& dir);

struct SyntheticOptions {
  std::size_t collections = 10;
  std::size_t items = 100;
  std::size_t dim = 64;
  std::size_t clusters = 10;
  std::size_t words = 50;
  std::size_t budget = 10;
  std::size_t noise_words = 0;  // extra random words per item
  double spread = 0.35;         // within-cluster std on signal coordinates
  double nuisance = 1.0;        // std of the non-signal coordinates
  bool with_query = false;      // one query per collection aimed at a cluster
  std::uint64_t seed = 42;
};

// Gaussian clusters with a planted reference summary of k cluster medoids.
// Only the first max(1, dim/4) coordinates carry cluster signal; the rest
// are zero-mean nuisance noise. Pure function of the options.
std::vector<Collection> gen_synthetic(const SyntheticOptions& options);

// Cluster id of every item, recomputed from word counts (word id < clusters).
std::vector<std::size_t> synthetic_cluster_labels(const Collection& c, std::size_t clusters);

struct Split {
  std::vector<std::size_t> train;
  std::size_t validation = 0;
  std::size_t test = 0;
};

// Collection i is the test set of split i; validation rotates to i + 1.
std::vector<Split> loocv_splits(std::size_t num_collections);

}  // namespace dsn
