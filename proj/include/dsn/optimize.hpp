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

// Cardinality-constrained greedy maximization.
//
// Both variants always fill the budget (negative gains are still taken) and
// break ties toward the lowest item id, so on submodular objectives the lazy
// variant reproduces the naive one exactly: same ids, same order, same gains.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "dsn/component.hpp"
#include "dsn/embedder.hpp"
#include "dsn/mixture.hpp"
#include "dsn/vrouge.hpp"

namespace dsn {

struct GreedyTrace {
  ItemSet selected;
  std::vector<double> gains;

  double total() const;
};

// Set function with an incremental marginal-gain oracle.
class IncrementalObjective {
 public:
  virtual ~IncrementalObjective() = default;
  virtual std::size_t ground_size() const = 0;
  virtual double gain(std::size_t v) const = 0;
  virtual void insert(std::size_t v) = 0;
};

// Wraps an arbitrary from-scratch set function; gain = f(A + v) - f(A).
class SetFunctionObjective : public IncrementalObjective {
 public:
  using Fn = std::function<double(const ItemSet&)>;
  SetFunctionObjective(std::size_t n, Fn fn);

  std::size_t ground_size() const override { return n_; }
  double gain(std::size_t v) const override;
  void insert(std::size_t v) override;

 private:
  std::size_t n_;
  Fn fn_;
  ItemSet current_;
  double current_value_;
};

class ModelObjective : public IncrementalObjective {
 public:
  ModelObjective(const DsnModel& model, const KernelState& state) : cache_(model, state) {}

  std::size_t ground_size() const override { return cache_.ground_size(); }
  double gain(std::size_t v) const override { return cache_.gain(v); }
  void insert(std::size_t v) override { cache_.insert(v); }

 private:
  ModelCache cache_;
};

// F(A) + l(A) with l(A) = 1 - r(A).
class LossAugmentedObjective : public IncrementalObjective {
 public:
  LossAugmentedObjective(const DsnModel& model, const KernelState& state,
                         const VRougeScorer& scorer);

  std::size_t ground_size() const override { return model_.ground_size(); }
  double gain(std::size_t v) const override;
  void insert(std::size_t v) override;

 private:
  ModelCache model_;
  VRougeScorer::Cache loss_;
};

GreedyTrace greedy(IncrementalObjective& objective, std::size_t k);
GreedyTrace lazy_greedy(IncrementalObjective& objective, std::size_t k);

// Summary under the model (lazy greedy; the model is submodular).
GreedyTrace summarize(const DsnModel& model, const KernelState& state, std::size_t k);

// Most violating summary argmax_{|A| = k} F(A) + l(A), by naive greedy.
GreedyTrace loss_augmented_inference(const DsnModel& model, const KernelState& state,
                                     const VRougeScorer& scorer, std::size_t k);

}  // namespace dsn
