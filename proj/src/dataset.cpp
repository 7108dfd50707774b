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

#include "dsn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dsn/error.hpp"

namespace dsn {

using nlohmann::json;
namespace fs = std::filesystem;

Matrix Collection::feature_matrix() const {
  Matrix m(items.size(), dim);
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::copy(items[i].raw_features.begin(), items[i].raw_features.end(), m.row(i).begin());
  }
  return m;
}

std::vector<WordHistogram> Collection::histograms() const {
  std::vector<WordHistogram> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.word_counts);
  return out;
}

void Collection::validate() const {
  require(!items.empty(), ErrorCode::kMalformedFile, name + ": collection has no items");
  require(dim >= 1, ErrorCode::kMalformedFile, name + ": dim must be >= 1");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Item& item = items[i];
    require(item.id == i, ErrorCode::kMalformedFile, name + ": item ids must be 0..n-1");
    require(item.raw_features.size() == dim, ErrorCode::kDimensionMismatch,
            name + ": item " + std::to_string(i) + " has " +
                std::to_string(item.raw_features.size()) + " features, expected " +
                std::to_string(dim));
    for (double x : item.raw_features) {
      require(std::isfinite(x), ErrorCode::kMalformedFile,
              name + ": non-finite feature in item " + std::to_string(i));
    }
    for (const auto& [word, count] : item.word_counts) {
      require(count >= 0, ErrorCode::kMalformedFile, name + ": negative word count");
    }
  }
  for (const auto& s : reference_summaries) validate_set(s, items.size());
  for (const auto& q : queries) {
    require(q.features.rows() >= 1, ErrorCode::kMalformedFile,
            name + ": query '" + q.label + "' has no vectors");
    require(q.features.all_finite(), ErrorCode::kMalformedFile,
            name + ": query '" + q.label + "' has non-finite features");
    for (const auto& s : q.summaries) validate_set(s, items.size());
  }
}

namespace {

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix parse_rows(const json& rows, const std::string& what) {
  require(rows.is_array(), ErrorCode::kMalformedFile, what + " must be an array of rows");
  if (rows.empty()) return {};
  const std::size_t cols = rows[0].size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = rows[r].get<std::vector<double>>();
    require(row.size() == cols, ErrorCode::kDimensionMismatch, what + ": ragged rows");
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

std::vector<std::vector<double>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        fail(ErrorCode::kMalformedFile, path.string() + ": bad number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ItemSet parse_ids(const json& ids) {
  ItemSet out;
  for (const auto& v : ids) {
    require(v.is_number_integer(), ErrorCode::kMalformedFile, "summary ids must be integers");
    const auto id = v.get<std::int64_t>();
    require(id >= 0, ErrorCode::kIdOutOfRange, "negative summary id");
    out.push_back(static_cast<std::size_t>(id));
  }
  return out;
}

}  // namespace

json collection_to_json(const Collection& c) {
  json doc;
  doc["name"] = c.name;
  doc["dim"] = c.dim;
  doc["features"] = matrix_rows(c.feature_matrix());
  json words = json::array();
  for (const auto& item : c.items) {
    json counts = json::object();
    for (const auto& [word, count] : item.word_counts) counts[std::to_string(word)] = count;
    words.push_back(std::move(counts));
  }
  doc["word_counts"] = std::move(words);
  doc["summaries"] = c.reference_summaries;
  json queries = json::array();
  for (const auto& q : c.queries) {
    queries.push_back(
        {{"label", q.label}, {"features", matrix_rows(q.features)}, {"summaries", q.summaries}});
  }
  doc["queries"] = std::move(queries);
  if (c.vrouge_norm) {
    const NormConstants& nc = *c.vrouge_norm;
    doc["vrouge_norm"] = {{"r_random", nc.r_random}, {"r_human", nc.r_human},
                          {"samples", nc.samples},   {"seed", nc.seed},
                          {"budget", nc.budget}};
  }
  return doc;
}

Collection collection_from_json(const json& doc, const fs::path& base_dir) {
  Collection c;
  try {
    require(doc.is_object(), ErrorCode::kMalformedFile, "collection must be a JSON object");
    c.name = doc.value("name", std::string("unnamed"));
    c.dim = doc.at("dim").get<std::size_t>();
    std::vector<std::vector<double>> features;
    if (doc.contains("features")) {
      features = doc.at("features").get<std::vector<std::vector<double>>>();
    } else if (doc.contains("features_csv")) {
      features = read_csv(base_dir / doc.at("features_csv").get<std::string>());
    } else {
      fail(ErrorCode::kMalformedFile, c.name + ": needs 'features' or 'features_csv'");
    }
    const json& words = doc.at("word_counts");
    require(words.is_array() && words.size() == features.size(), ErrorCode::kMalformedFile,
            c.name + ": word_counts must have one entry per item");
    for (std::size_t i = 0; i < features.size(); ++i) {
      Item item;
      item.id = i;
      item.raw_features = std::move(features[i]);
      require(words[i].is_object(), ErrorCode::kMalformedFile,
              c.name + ": word_counts entries must be objects");
      for (const auto& [key, value] : words[i].items()) {
        std::int64_t word = 0;
        try {
          std::size_t used = 0;
          word = std::stoll(key, &used);
          require(used == key.size(), ErrorCode::kMalformedFile, "bad word id '" + key + "'");
        } catch (const std::logic_error&) {
          fail(ErrorCode::kMalformedFile, c.name + ": bad word id '" + key + "'");
        }
        require(value.is_number_integer(), ErrorCode::kMalformedFile,
                c.name + ": word counts must be integers");
        item.word_counts[word] = value.get<std::int64_t>();
      }
      c.items.push_back(std::move(item));
    }
    for (const auto& s : doc.value("summaries", json::array())) {
      c.reference_summaries.push_back(parse_ids(s));
    }
    for (const auto& q : doc.value("queries", json::array())) {
      QuerySet qs;
      qs.label = q.value("label", std::string());
      qs.features = parse_rows(q.at("features"), c.name + " query '" + qs.label + "'");
      for (const auto& s : q.value("summaries", json::array())) {
        qs.summaries.push_back(parse_ids(s));
      }
      c.queries.push_back(std::move(qs));
    }
    if (doc.contains("vrouge_norm")) {
      const json& v = doc.at("vrouge_norm");
      NormConstants nc;
      nc.r_random = v.at("r_random").get<double>();
      nc.r_human = v.at("r_human").get<double>();
      nc.samples = v.value("samples", std::size_t{0});
      nc.seed = v.value("seed", std::uint64_t{0});
      nc.budget = v.value("budget", std::size_t{0});
      c.vrouge_norm = nc;
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedFile, c.name + ": " + e.what());
  }
  c.validate();
  return c;
}

Collection load_collection(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedFile, path.string() + ": " + e.what());
  }
  return collection_from_json(doc, path.parent_path());
}

void save_collection(const Collection& c, const fs::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out << collection_to_json(c).dump(1) << '\n';
}

std::vector<Collection> load_dataset(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.json";
  std::ifstream in(manifest);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot read " + manifest.string());
  std::vector<Collection> out;
  try {
    const json doc = json::parse(in);
    for (const auto& file : doc.at("collections")) {
      out.push_back(load_collection(dir / file.get<std::string>()));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedFile, manifest.string() + ": " + e.what());
  }
  return out;
}

void save_dataset(const std::vector<Collection>& collections, const fs::path& dir) {
  fs::create_directories(dir);
  json files = json::array();
  for (std::size_t i = 0; i < collections.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "collection_%03zu.json", i);
    save_collection(collections[i], dir / name);
    files.push_back(name);
  }
  std::ofstream out(dir / "manifest.json");
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write manifest in " + dir.string());
  out << json{{"collections", files}}.dump(2) << '\n';
}

namespace {

double sq_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

Collection make_synthetic_collection(const SyntheticOptions& o, SeededRng& rng,
                                     std::size_t index) {
  const std::size_t signal = std::max<std::size_t>(1, o.dim / 4);
  Matrix centers(o.clusters, o.dim);
  for (std::size_t c = 0; c < o.clusters; ++c) {
    for (std::size_t t = 0; t < signal; ++t) centers(c, t) = 2.0 * std::abs(rng.normal());
  }

  const std::size_t query_cluster = o.with_query ? rng.below(o.clusters) : o.clusters;
  std::vector<std::size_t> assignment;
  for (std::size_t c = 0; c < o.clusters; ++c) assignment.push_back(c);
  if (o.with_query) {
    for (std::size_t i = 1; i < o.budget; ++i) assignment.push_back(query_cluster);
  }
  std::vector<double> weight(o.clusters);
  for (double& w : weight) w = rng.uniform(0.25, 1.0);
  const double weight_total = std::accumulate(weight.begin(), weight.end(), 0.0);
  while (assignment.size() < o.items) {
    double u = rng.uniform() * weight_total;
    std::size_t c = 0;
    while (c + 1 < o.clusters && u >= weight[c]) u -= weight[c++];
    assignment.push_back(c);
  }
  for (std::size_t i = assignment.size(); i > 1; --i) {
    std::swap(assignment[i - 1], assignment[rng.below(i)]);
  }

  Collection col;
  char name[32];
  std::snprintf(name, sizeof(name), "synthetic_%03zu", index);
  col.name = name;
  col.dim = o.dim;
  for (std::size_t i = 0; i < o.items; ++i) {
    Item item;
    item.id = i;
    const std::size_t c = assignment[i];
    item.raw_features.resize(o.dim);
    for (std::size_t t = 0; t < o.dim; ++t) {
      item.raw_features[t] =
          t < signal ? centers(c, t) + o.spread * rng.normal() : o.nuisance * rng.normal();
    }
    item.word_counts[static_cast<std::int64_t>(c)] = 1;
    for (std::size_t w = 0; w < o.noise_words; ++w) {
      const auto word = static_cast<std::int64_t>(o.clusters + rng.below(o.words - o.clusters));
      item.word_counts[word] += 1;
    }
    col.items.push_back(std::move(item));
  }

  std::vector<std::vector<std::size_t>> members(o.clusters);
  for (std::size_t i = 0; i < o.items; ++i) members[assignment[i]].push_back(i);

  // Reference: the medoid of each of `budget` randomly chosen clusters,
  // measured on the signal coordinates only.
  auto signal_part = [&](const Item& item) {
    return std::span<const double>(item.raw_features.data(), signal);
  };
  std::vector<std::size_t> order(o.clusters);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < o.budget; ++i) std::swap(order[i], order[i + rng.below(o.clusters - i)]);
  ItemSet reference;
  for (std::size_t r = 0; r < o.budget; ++r) {
    const auto& group = members[order[r]];
    std::size_t medoid = group.front();
    double best = 0.0;
    for (std::size_t a : group) {
      double cost = 0.0;
      for (std::size_t b : group) {
        cost += std::sqrt(sq_distance(signal_part(col.items[a]), signal_part(col.items[b])));
      }
      if (a == group.front() || cost < best) {
        best = cost;
        medoid = a;
      }
    }
    reference.push_back(medoid);
  }
  std::sort(reference.begin(), reference.end());
  col.reference_summaries.push_back(reference);

  if (o.with_query) {
    QuerySet q;
    q.label = "cluster_" + std::to_string(query_cluster);
    q.features = Matrix(1, o.dim);
    const double norm = l2_norm(centers.row(query_cluster));
    for (std::size_t t = 0; t < o.dim; ++t) q.features(0, t) = centers(query_cluster, t) / norm;
    std::vector<std::size_t> group = members[query_cluster];
    std::stable_sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
      const auto center = centers.row(query_cluster).first(signal);
      return sq_distance(signal_part(col.items[a]), center) <
             sq_distance(signal_part(col.items[b]), center);
    });
    ItemSet target(group.begin(), group.begin() + static_cast<std::ptrdiff_t>(o.budget));
    std::sort(target.begin(), target.end());
    q.summaries.push_back(std::move(target));
    col.queries.push_back(std::move(q));
  }

  VRougeScorer scorer(col.reference_summaries, col.histograms());
  try {
    col.vrouge_norm = norm_constants(scorer, o.budget, kDefaultNormSamples, kDefaultNormSeed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerate) throw;
  }
  return col;
}

}  // namespace

std::vector<Collection> gen_synthetic(const SyntheticOptions& o) {
  require(o.collections >= 1, ErrorCode::kInvalidArgument, "collections must be >= 1");
  require(o.items >= 1 && o.dim >= 1, ErrorCode::kInvalidArgument,
          "items and dim must be >= 1");
  require(o.clusters >= 1 && o.clusters <= o.items, ErrorCode::kInvalidArgument,
          "clusters must lie in [1, items]");
  require(o.budget >= 1 && o.budget <= o.clusters, ErrorCode::kInvalidArgument,
          "budget must lie in [1, clusters]");
  require(o.spread >= 0.0 && o.nuisance >= 0.0, ErrorCode::kInvalidArgument,
          "spread and nuisance must be >= 0");
  require(o.words >= o.clusters, ErrorCode::kInvalidArgument,
          "words must be >= clusters (one word per cluster)");
  require(o.noise_words == 0 || o.words > o.clusters, ErrorCode::kInvalidArgument,
          "noise words need words > clusters");
  require(!o.with_query || o.items + 1 >= o.clusters + o.budget, ErrorCode::kInvalidArgument,
          "query mode needs items >= clusters + budget - 1");
  SeededRng rng(o.seed);
  std::vector<Collection> out;
  for (std::size_t i = 0; i < o.collections; ++i) {
    out.push_back(make_synthetic_collection(o, rng, i));
  }
  return out;
}

std::vector<std::size_t> synthetic_cluster_labels(const Collection& c, std::size_t clusters) {
  std::vector<std::size_t> labels(c.size(), clusters);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (const auto& [word, count] : c.items[i].word_counts) {
      if (count > 0 && word >= 0 && static_cast<std::size_t>(word) < clusters) {
        labels[i] = static_cast<std::size_t>(word);
        break;
      }
    }
  }
  return labels;
}

std::vector<Split> loocv_splits(std::size_t num_collections) {
  require(num_collections >= 3, ErrorCode::kInvalidArgument,
          "leave-one-out needs at least 3 collections");
  std::vector<Split> splits;
  for (std::size_t test = 0; test < num_collections; ++test) {
    Split s;
    s.test = test;
    s.validation = (test + 1) % num_collections;
    for (std::size_t i = 0; i < num_collections; ++i) {
      if (i != test && i != s.validation) s.train.push_back(i);
    }
    splits.push_back(std::move(s));
  }
  return splits;
}

}  // namespace dsn
