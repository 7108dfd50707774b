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

// Max-margin training of the whole network.
//
// Per example n with reference summary Y and budget k:
//   L_n = max_{|A| = k} [F(A) + l(A)] - F(Y) + beta/2 |w|^2,  l(A) = 1 - r(A)
// where the max is approximated by greedy loss-augmented inference. Each
// epoch first updates w with (lambda, theta) fixed, then (lambda, theta)
// with w fixed, each phase with its own Adam state and fresh inference.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsn/dataset.hpp"
#include "dsn/mixture.hpp"
#include "dsn/optimize.hpp"
#include "dsn/vrouge.hpp"

namespace dsn {

// One ground set prepared for training or scoring: raw features, the
// (optional) query vectors, the V-ROUGE scorer and its normalization.
struct Instance {
  std::string name;
  Matrix raw;
  Matrix queries;  // 0 rows in generic mode
  VRougeScorer scorer;
  NormConstants norm;
  std::size_t budget = 0;

  KernelState kernel_state(const DsnModel& model) const;
};

using InstancePtr = std::shared_ptr<const Instance>;

// Generic mode: one instance per collection. Query mode: one per query set.
std::vector<InstancePtr> make_instances(const Collection& collection, Mode mode,
                                        std::size_t budget);

struct TrainExample {
  InstancePtr instance;
  ItemSet target;
};

// One example per reference summary.
std::vector<TrainExample> make_examples(const std::vector<InstancePtr>& instances);

struct TrainConfig {
  double beta = 0.01;
  std::size_t epochs = 50;
  double lr_w = 0.01;
  double lr_theta = 0.001;
  double lr_lambda = 0.01;
  double decay = 0.1;
  double tol = 1e-4;
  std::uint64_t seed = 42;
  std::size_t budget = 10;
  Mode mode = Mode::kGeneric;

  void validate() const;
};

struct ModelSpec {
  Mode mode = Mode::kGeneric;
  std::size_t hidden = 512;
  std::vector<ComponentInit> components;
  std::optional<std::vector<Concave>> outer;

  static ModelSpec default_generic();
  static ModelSpec default_query();
};

struct RunConfig {
  ModelSpec model;
  TrainConfig train;
  std::string dataset;
};

RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

DsnModel init_model(const ModelSpec& spec, std::size_t input_dim, std::uint64_t seed);

struct HingeResult {
  double value = 0.0;
  GreedyTrace a_hat;
};

HingeResult hinge_objective(const DsnModel& model, const TrainExample& example, double beta);
// Variant reusing a kernel state already computed for the current theta.
HingeResult hinge_objective(const DsnModel& model, const TrainExample& example,
                            const KernelState& state, double beta);

ModelGradients compute_subgradients(const DsnModel& model, const TrainExample& example,
                                    double beta);

// Normalized V-ROUGE of the model's budget-k summary.
double score_instance(const DsnModel& model, const Instance& instance);
double mean_score(const DsnModel& model, const std::vector<InstancePtr>& instances);

struct EpochRow {
  std::size_t epoch = 0;
  double objective = 0.0;
  double train_vrouge = 0.0;
  double val_vrouge = 0.0;
};

struct TrainReport {
  TrainConfig config;
  double initial_train_vrouge = 0.0;
  double initial_val_vrouge = 0.0;
  std::vector<EpochRow> rows;  // one per completed epoch
  DsnModel final_model;
  DsnModel best_model;  // highest validation score, epoch 0 included
  std::size_t best_epoch = 0;
  double best_val_vrouge = 0.0;
  bool converged = false;
};

TrainReport fit(const std::vector<TrainExample>& train,
                const std::vector<InstancePtr>& validation, DsnModel model,
                const TrainConfig& config);

void write_report_csv(const TrainReport& report, const std::filesystem::path& path);

struct FoldResult {
  std::string test_name;
  std::size_t best_epoch = 0;
  double val_vrouge = 0.0;
  double test_vrouge = 0.0;
};

struct LoocvResult {
  std::vector<FoldResult> folds;
  double mean_test_vrouge = 0.0;
};

LoocvResult run_loocv(const std::vector<Collection>& collections, const ModelSpec& spec,
                      const TrainConfig& config);

}  // namespace dsn
