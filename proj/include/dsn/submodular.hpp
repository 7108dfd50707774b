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

// Generic summarization functions over a similarity kernel S (n x n) or a
// nonnegative feature matrix F (n x h). The max over an empty set is 0.
//
//   FL   sum_{i in V} max_{j in A} s_ij
//   FLP  FL(A) - lambda sum_{i,j in A} s_ij
//   SC   sum_{i in V} min(sum_{j in A} s_ij, lambda sum_{j in V} s_ij)
//   GC   lambda sum_{i in V} sum_{j in A} s_ij - sum_{i,j in A} s_ij
//   FB   sum_t gamma_t psi(sum_{a in A} F_at)

#pragma once

#include <span>
#include <vector>

#include "dsn/component.hpp"
#include "dsn/numerics.hpp"

namespace dsn {

double eval_fl(const Matrix& s, const ItemSet& set);
double eval_flp(const Matrix& s, const ItemSet& set, double lambda);
double eval_sc(const Matrix& s, const ItemSet& set, double lambda);
double eval_gc(const Matrix& s, const ItemSet& set, double lambda);
double eval_fb(const Matrix& features, const ItemSet& set,
               std::span<const double> gamma, const Concave& psi = {});

// Lowest-index maximizer of row i of s over `set`; set must be nonempty.
std::size_t argmax_in_set(const Matrix& s, std::size_t i, const ItemSet& set);

namespace detail {

void sensitivity_fl(const Matrix& s, const ItemSet& set, double scale, Matrix& ds);
void sensitivity_flp(const Matrix& s, const ItemSet& set, double lambda, double scale,
                     Matrix& ds);
void sensitivity_sc(const KernelState& state, const ItemSet& set, double lambda,
                    double scale, Matrix& ds);
void sensitivity_gc(const Matrix& s, const ItemSet& set, double lambda, double scale,
                    Matrix& ds);
void sensitivity_fb(const Matrix& features, const ItemSet& set,
                    std::span<const double> gamma, const Concave& psi, double scale,
                    Matrix& dx);

double lambda_grad_flp(const Matrix& s, const ItemSet& set);
double lambda_grad_sc(const KernelState& state, const ItemSet& set, double lambda);
double lambda_grad_gc(const Matrix& s, const ItemSet& set);
std::vector<double> gamma_grad_fb(const Matrix& features, const ItemSet& set,
                                  const Concave& psi);

}  // namespace detail
}  // namespace dsn
