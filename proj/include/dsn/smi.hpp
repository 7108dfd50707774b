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

// Query-focused functions (submodular mutual information instances). SQ is
// n x |Q| with sq_iq the similarity of item i to query q.
//
//   GCMI   2 sum_{i in A} sum_{q in Q} sq_iq
//   FL1MI  sum_{i in V} min(max_{j in A} s_ij, lambda max_{q in Q} sq_iq)
//   FL2MI  sum_{q in Q} max_{j in A} sq_jq + lambda sum_{i in A} max_{q in Q} sq_iq

#pragma once

#include "dsn/component.hpp"
#include "dsn/numerics.hpp"

namespace dsn {

double eval_gcmi(const Matrix& sq, const ItemSet& set);
double eval_fl1mi(const Matrix& s, const Matrix& sq, const ItemSet& set, double lambda);
double eval_fl2mi(const Matrix& sq, const ItemSet& set, double lambda);

namespace detail {

void sensitivity_gcmi(const Matrix& sq, const ItemSet& set, double scale, Matrix& dsq);
void sensitivity_fl1mi(const KernelState& state, const ItemSet& set, double lambda,
                       double scale, Matrix& ds, Matrix& dsq);
void sensitivity_fl2mi(const KernelState& state, const ItemSet& set, double lambda,
                       double scale, Matrix& dsq);

double lambda_grad_fl1mi(const KernelState& state, const ItemSet& set, double lambda);
double lambda_grad_fl2mi(const KernelState& state, const ItemSet& set);

}  // namespace detail
}  // namespace dsn
