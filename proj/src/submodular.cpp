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

#include "dsn/submodular.hpp"

#include <algorithm>
#include <string>

#include "dsn/error.hpp"

namespace dsn {
namespace {

void check_square(const Matrix& s) {
  require(s.rows() == s.cols(), ErrorCode::kShapeMismatch, "similarity must be square");
}

double pair_sum(const Matrix& s, const ItemSet& set) {
  double total = 0.0;
  for (std::size_t i : set) {
    for (std::size_t j : set) total += s(i, j);
  }
  return total;
}

double row_sum_over(const Matrix& s, std::size_t i, const ItemSet& set) {
  double total = 0.0;
  for (std::size_t j : set) total += s(i, j);
  return total;
}

double row_total(const Matrix& s, std::size_t i) {
  double total = 0.0;
  for (std::size_t j = 0; j < s.cols(); ++j) total += s(i, j);
  return total;
}

}  // namespace

std::size_t argmax_in_set(const Matrix& s, std::size_t i, const ItemSet& set) {
  std::size_t best = set.front();
  for (std::size_t j : set) {
    if (s(i, j) > s(i, best) || (s(i, j) == s(i, best) && j < best)) best = j;
  }
  return best;
}

double eval_fl(const Matrix& s, const ItemSet& set) {
  check_square(s);
  validate_set(set, s.rows());
  if (set.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) total += s(i, argmax_in_set(s, i, set));
  return total;
}

double eval_flp(const Matrix& s, const ItemSet& set, double lambda) {
  return eval_fl(s, set) - lambda * pair_sum(s, set);
}

double eval_sc(const Matrix& s, const ItemSet& set, double lambda) {
  check_square(s);
  validate_set(set, s.rows());
  if (set.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    total += std::min(row_sum_over(s, i, set), lambda * row_total(s, i));
  }
  return total;
}

double eval_gc(const Matrix& s, const ItemSet& set, double lambda) {
  check_square(s);
  validate_set(set, s.rows());
  if (set.empty()) return 0.0;
  double cover = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) cover += row_sum_over(s, i, set);
  return lambda * cover - pair_sum(s, set);
}

double eval_fb(const Matrix& features, const ItemSet& set,
               std::span<const double> gamma, const Concave& psi) {
  validate_set(set, features.rows());
  require(gamma.size() == features.cols(), ErrorCode::kDimensionMismatch,
          "FB: gamma length " + std::to_string(gamma.size()) + " != feature dim " +
              std::to_string(features.cols()));
  if (set.empty()) return 0.0;
  for (std::size_t a : set) {
    for (double v : features.row(a)) {
      require(v >= 0.0, ErrorCode::kInvalidArgument, "FB: negative feature value");
    }
  }
  double total = 0.0;
  for (std::size_t t = 0; t < features.cols(); ++t) {
    double mass = 0.0;
    for (std::size_t a : set) mass += features(a, t);
    total += gamma[t] * psi.value(mass);
  }
  return total;
}

namespace detail {

void sensitivity_fl(const Matrix& s, const ItemSet& set, double scale, Matrix& ds) {
  if (set.empty()) return;
  for (std::size_t i = 0; i < s.rows(); ++i) ds(i, argmax_in_set(s, i, set)) += scale;
}

void sensitivity_flp(const Matrix& s, const ItemSet& set, double lambda, double scale,
                     Matrix& ds) {
  sensitivity_fl(s, set, scale, ds);
  for (std::size_t i : set) {
    for (std::size_t j : set) ds(i, j) -= scale * lambda;
  }
}

void sensitivity_sc(const KernelState& state, const ItemSet& set, double lambda,
                    double scale, Matrix& ds) {
  if (set.empty()) return;
  const Matrix& s = state.similarity;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const double cover = row_sum_over(s, i, set);
    const double cap = lambda * state.row_total[i];
    if (cap <= cover) {
      for (std::size_t j = 0; j < s.cols(); ++j) ds(i, j) += scale * lambda;
    } else {
      for (std::size_t j : set) ds(i, j) += scale;
    }
  }
}

void sensitivity_gc(const Matrix& s, const ItemSet& set, double lambda, double scale,
                    Matrix& ds) {
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j : set) ds(i, j) += scale * lambda;
  }
  for (std::size_t i : set) {
    for (std::size_t j : set) ds(i, j) -= scale;
  }
}

void sensitivity_fb(const Matrix& features, const ItemSet& set,
                    std::span<const double> gamma, const Concave& psi, double scale,
                    Matrix& dx) {
  if (set.empty()) return;
  for (std::size_t t = 0; t < features.cols(); ++t) {
    double mass = 0.0;
    for (std::size_t a : set) mass += features(a, t);
    const double coeff = scale * gamma[t] * psi.derivative(mass);
    for (std::size_t a : set) dx(a, t) += coeff;
  }
}

double lambda_grad_flp(const Matrix& s, const ItemSet& set) { return -pair_sum(s, set); }

double lambda_grad_sc(const KernelState& state, const ItemSet& set, double lambda) {
  if (set.empty()) return 0.0;
  const Matrix& s = state.similarity;
  double grad = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const double cap = lambda * state.row_total[i];
    if (cap <= row_sum_over(s, i, set)) grad += state.row_total[i];
  }
  return grad;
}

double lambda_grad_gc(const Matrix& s, const ItemSet& set) {
  double cover = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) cover += row_sum_over(s, i, set);
  return cover;
}

std::vector<double> gamma_grad_fb(const Matrix& features, const ItemSet& set,
                                  const Concave& psi) {
  std::vector<double> grad(features.cols(), 0.0);
  if (set.empty()) return grad;
  for (std::size_t t = 0; t < features.cols(); ++t) {
    double mass = 0.0;
    for (std::size_t a : set) mass += features(a, t);
    grad[t] = psi.value(mass);
  }
  return grad;
}

}  // namespace detail
}  // namespace dsn
