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

#include "dsn/smi.hpp"

#include <algorithm>

#include "dsn/error.hpp"
#include "dsn/submodular.hpp"

namespace dsn {
namespace {

// Lowest-index maximizer over the rows in `set` for column q of sq.
std::size_t argmax_rows(const Matrix& sq, std::size_t q, const ItemSet& set) {
  std::size_t best = set.front();
  for (std::size_t j : set) {
    if (sq(j, q) > sq(best, q) || (sq(j, q) == sq(best, q) && j < best)) best = j;
  }
  return best;
}

double query_max(const Matrix& sq, std::size_t i) {
  double best = 0.0;
  for (std::size_t q = 0; q < sq.cols(); ++q) {
    if (q == 0 || sq(i, q) > best) best = sq(i, q);
  }
  return best;
}

}  // namespace

double eval_gcmi(const Matrix& sq, const ItemSet& set) {
  validate_set(set, sq.rows());
  double total = 0.0;
  for (std::size_t i : set) {
    for (std::size_t q = 0; q < sq.cols(); ++q) total += sq(i, q);
  }
  return 2.0 * total;
}

double eval_fl1mi(const Matrix& s, const Matrix& sq, const ItemSet& set, double lambda) {
  require(s.rows() == s.cols() && sq.rows() == s.rows(), ErrorCode::kShapeMismatch,
          "FL1MI: kernel shapes disagree");
  validate_set(set, s.rows());
  if (set.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    total += std::min(s(i, argmax_in_set(s, i, set)), lambda * query_max(sq, i));
  }
  return total;
}

double eval_fl2mi(const Matrix& sq, const ItemSet& set, double lambda) {
  validate_set(set, sq.rows());
  if (set.empty()) return 0.0;
  double coverage = 0.0;
  for (std::size_t q = 0; q < sq.cols(); ++q) coverage += sq(argmax_rows(sq, q, set), q);
  double relevance = 0.0;
  for (std::size_t i : set) relevance += query_max(sq, i);
  return coverage + lambda * relevance;
}

namespace detail {

void sensitivity_gcmi(const Matrix& sq, const ItemSet& set, double scale, Matrix& dsq) {
  for (std::size_t i : set) {
    for (std::size_t q = 0; q < sq.cols(); ++q) dsq(i, q) += 2.0 * scale;
  }
}

void sensitivity_fl1mi(const KernelState& state, const ItemSet& set, double lambda,
                       double scale, Matrix& ds, Matrix& dsq) {
  if (set.empty() || state.num_queries() == 0) return;
  const Matrix& s = state.similarity;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const std::size_t ja = argmax_in_set(s, i, set);
    if (lambda * state.query_max[i] <= s(i, ja)) {
      dsq(i, state.query_argmax[i]) += scale * lambda;
    } else {
      ds(i, ja) += scale;
    }
  }
}

void sensitivity_fl2mi(const KernelState& state, const ItemSet& set, double lambda,
                       double scale, Matrix& dsq) {
  if (set.empty() || state.num_queries() == 0) return;
  const Matrix& sq = state.query_similarity;
  for (std::size_t q = 0; q < sq.cols(); ++q) dsq(argmax_rows(sq, q, set), q) += scale;
  for (std::size_t i : set) dsq(i, state.query_argmax[i]) += scale * lambda;
}

double lambda_grad_fl1mi(const KernelState& state, const ItemSet& set, double lambda) {
  if (set.empty() || state.num_queries() == 0) return 0.0;
  const Matrix& s = state.similarity;
  double grad = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const double data_side = s(i, argmax_in_set(s, i, set));
    if (lambda * state.query_max[i] <= data_side) grad += state.query_max[i];
  }
  return grad;
}

double lambda_grad_fl2mi(const KernelState& state, const ItemSet& set) {
  double grad = 0.0;
  for (std::size_t i : set) grad += state.query_max[i];
  return grad;
}

}  // namespace detail
}  // namespace dsn
