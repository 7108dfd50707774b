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

#include "dsn/optimize.hpp"

#include <cmath>
#include <queue>
#include <string>

#include "dsn/error.hpp"

namespace dsn {
namespace {

void check_budget(std::size_t k, std::size_t n) {
  require(k >= 1, ErrorCode::kInvalidArgument, "budget must be >= 1");
  require(k <= n, ErrorCode::kInvalidArgument,
          "budget " + std::to_string(k) + " exceeds ground set size " + std::to_string(n));
}

void check_gain(double g, std::size_t v) {
  require(std::isfinite(g), ErrorCode::kNumerical,
          "non-finite marginal gain for item " + std::to_string(v));
}

}  // namespace

double GreedyTrace::total() const {
  double s = 0.0;
  for (double g : gains) s += g;
  return s;
}

SetFunctionObjective::SetFunctionObjective(std::size_t n, Fn fn)
    : n_(n), fn_(std::move(fn)), current_value_(fn_(ItemSet{})) {}

double SetFunctionObjective::gain(std::size_t v) const {
  ItemSet next = current_;
  next.push_back(v);
  return fn_(next) - current_value_;
}

void SetFunctionObjective::insert(std::size_t v) {
  current_.push_back(v);
  current_value_ = fn_(current_);
}

LossAugmentedObjective::LossAugmentedObjective(const DsnModel& model,
                                               const KernelState& state,
                                               const VRougeScorer& scorer)
    : model_(model, state), loss_(scorer) {
  require(scorer.ground_size() == state.size(), ErrorCode::kShapeMismatch,
          "word histograms and kernel disagree on ground set size");
}

double LossAugmentedObjective::gain(std::size_t v) const {
  return model_.gain(v) - loss_.gain(v);
}

void LossAugmentedObjective::insert(std::size_t v) {
  model_.insert(v);
  loss_.insert(v);
}

GreedyTrace greedy(IncrementalObjective& objective, std::size_t k) {
  const std::size_t n = objective.ground_size();
  check_budget(k, n);
  GreedyTrace trace;
  std::vector<char> taken(n, 0);
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = n;
    double best_gain = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (taken[v]) continue;
      const double g = objective.gain(v);
      check_gain(g, v);
      if (best == n || g > best_gain) {
        best = v;
        best_gain = g;
      }
    }
    objective.insert(best);
    taken[best] = 1;
    trace.selected.push_back(best);
    trace.gains.push_back(best_gain);
  }
  return trace;
}

GreedyTrace lazy_greedy(IncrementalObjective& objective, std::size_t k) {
  const std::size_t n = objective.ground_size();
  check_budget(k, n);
  struct Entry {
    double bound;
    std::size_t item;
    std::size_t round;  // step at which bound was computed
  };
  // Largest bound first, lowest id among equal bounds.
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.item > b.item;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
  for (std::size_t v = 0; v < n; ++v) {
    const double g = objective.gain(v);
    check_gain(g, v);
    queue.push({g, v, 0});
  }
  GreedyTrace trace;
  for (std::size_t step = 0; step < k; ++step) {
    while (true) {
      Entry top = queue.top();
      queue.pop();
      if (top.round == step) {
        objective.insert(top.item);
        trace.selected.push_back(top.item);
        trace.gains.push_back(top.bound);
        break;
      }
      const double g = objective.gain(top.item);
      check_gain(g, top.item);
      queue.push({g, top.item, step});
    }
  }
  return trace;
}

GreedyTrace summarize(const DsnModel& model, const KernelState& state, std::size_t k) {
  ModelObjective objective(model, state);
  return lazy_greedy(objective, k);
}

GreedyTrace loss_augmented_inference(const DsnModel& model, const KernelState& state,
                                     const VRougeScorer& scorer, std::size_t k) {
  LossAugmentedObjective objective(model, state, scorer);
  return greedy(objective, k);
}

}  // namespace dsn
