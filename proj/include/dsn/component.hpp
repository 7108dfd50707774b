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

// Component descriptors and the uniform per-kind interface used by the
// mixture: evaluation, incremental marginal gains, and subgradients.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dsn/embedder.hpp"
#include "dsn/numerics.hpp"

namespace dsn {

using ItemSet = std::vector<std::size_t>;

enum class Kind { kFL, kFLP, kSC, kGC, kFB, kGCMI, kFL1MI, kFL2MI };

std::string_view kind_name(Kind kind);
Kind parse_kind(std::string_view name);
bool is_query_kind(Kind kind);

// Monotone concave scalar functions, used inside the feature-based function
// and as outer units of the concave composition.
struct Concave {
  enum class Type { kSqrt, kLog1p, kMinCap };
  Type type = Type::kSqrt;
  double cap = 1.0;  // kMinCap only

  double value(double x) const;
  // Right derivative; 0 at x = 0 for sqrt.
  double derivative(double x) const;

  std::string name() const;
  static Concave parse(std::string_view name, double cap = 1.0);
};

struct ComponentSpec {
  Kind kind = Kind::kFL;
  double lambda = 0.0;        // FLP, SC, GC, FL1MI, FL2MI
  std::vector<double> gamma;  // FB, one weight per embedding dimension
  Concave psi;                // FB

  static ComponentSpec make(Kind kind, double lambda = 0.0);
  static ComponentSpec feature_based(std::vector<double> gamma,
                                     Concave psi = {});

  // Number of trainable internal parameters.
  std::size_t num_params() const;
  std::vector<double> params() const;
  // Assigns and projects back onto the admissible range.
  void set_params(std::span<const double> values);
  void project();
  void validate() const;
};

// Throws on duplicate or out-of-range ids.
void validate_set(const ItemSet& set, std::size_t n);

double evaluate(const ComponentSpec& spec, const KernelState& state, const ItemSet& set);

// d f / d (internal parameters) at `set`, ordered as ComponentSpec::params().
std::vector<double> subgrad_params(const ComponentSpec& spec, const KernelState& state,
                                   const ItemSet& set);

// Adds scale * d f / d(S, SQ, X) at `set` into `out`, using the lowest-index
// maximizer at argmax ties and the query/cap side at min ties.
void accumulate_sensitivity(const ComponentSpec& spec, const KernelState& state,
                            const ItemSet& set, double scale, KernelSensitivity& out);

// d f / d theta through the batched backprop route.
Matrix subgrad_theta(const ComponentSpec& spec, const KernelState& state,
                     const ItemSet& set, const EmbedderParams& params,
                     const Matrix& raw);
// d f / d theta assembled from per-entry kernel gradients.
Matrix subgrad_theta(const ComponentSpec& spec, const KernelState& state,
                     const ItemSet& set, const KernelGradProvider& provider);

// Incremental state for greedy: marginal gains in O(n) (O(h) for FB).
class GreedyCache {
 public:
  GreedyCache(const ComponentSpec& spec, const KernelState& state);

  double gain(std::size_t v) const;
  void insert(std::size_t v);
  const ItemSet& selected() const { return selected_; }
  // Running sum of inserted gains, i.e. f(selected).
  double value() const { return value_; }

 private:
  const ComponentSpec* spec_;
  const KernelState* state_;
  ItemSet selected_;
  std::vector<char> in_set_;
  double value_ = 0.0;
  std::vector<double> best_;      // FL/FLP/FL1MI: max_{j in A} s_ij
  std::vector<double> row_sum_;   // sum_{j in A} s_ij
  std::vector<double> col_sum_;   // sum_{j in A} s_ji
  std::vector<double> mass_;      // FB: m_t(A)
  std::vector<double> query_best_;  // FL2MI: max_{j in A} sq_jq
};

}  // namespace dsn
