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

// The network: a shared embedder feeding M components, combined either as a
// nonnegative mixture
//   F(A) = sum_i w_i f_i(A)
// or as a concave composition with P outer units
//   F(A) = sum_p psi_p(sum_j W_pj f_j(A)).
// In query mode every component is a mutual-information kind and f_i(A)
// stands for I_{f_i}(A; Q).

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsn/component.hpp"
#include "dsn/embedder.hpp"
#include "dsn/numerics.hpp"

namespace dsn {

enum class Mode { kGeneric, kQuery };

std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

struct Composition {
  std::vector<Concave> outer;  // P
  Matrix weights;              // P x M, nonnegative
};

struct DsnModel {
  Mode mode = Mode::kGeneric;
  EmbedderParams embedder;
  std::vector<ComponentSpec> components;
  std::vector<double> weights;  // mixture weights, unused with a composition
  std::optional<Composition> composition;

  // The trainable combination weights: w, or W flattened row-major.
  std::span<double> combination_weights();
  std::span<const double> combination_weights() const;

  // Clamps weights to >= 0 and every internal parameter to its range.
  void project();
  // Throws on any invariant violation.
  void validate() const;
};

struct ComponentInit {
  Kind kind = Kind::kFL;
  double lambda = 0.0;  // gamma fill value for FB
  Concave psi;          // FB only
};

// Xavier theta (d x hidden), weights uniform in [0, 1].
DsnModel init_model(Mode mode, std::size_t input_dim, std::size_t hidden,
                    const std::vector<ComponentInit>& components, SeededRng& rng,
                    std::optional<std::vector<Concave>> outer = std::nullopt);

std::vector<double> component_values(const DsnModel& model, const KernelState& state,
                                     const ItemSet& set);

double eval_model(const DsnModel& model, const KernelState& state, const ItemSet& set);

// Incremental greedy state for the whole model.
class ModelCache {
 public:
  ModelCache(const DsnModel& model, const KernelState& state);

  double gain(std::size_t v) const;
  void insert(std::size_t v);
  const ItemSet& selected() const { return selected_; }
  std::size_t ground_size() const { return ground_size_; }

 private:
  const DsnModel* model_;
  std::vector<GreedyCache> caches_;
  std::vector<double> values_;  // f_j(selected)
  ItemSet selected_;
  std::size_t ground_size_;
};

struct ModelGradients {
  std::vector<double> weights;              // same layout as combination_weights()
  std::vector<std::vector<double>> params;  // per component, as ComponentSpec::params()
  Matrix theta;                             // d x h
};

// Subgradients of [F(a_hat) - F(target)] + (beta/2)|w|^2.
ModelGradients model_subgrads(const DsnModel& model, const KernelState& state,
                              const Matrix& raw, const ItemSet& a_hat,
                              const ItemSet& target, double beta);

nlohmann::json model_to_json(const DsnModel& model);
DsnModel model_from_json(const nlohmann::json& doc);
void save_model(const DsnModel& model, const std::filesystem::path& path);
DsnModel load_model(const std::filesystem::path& path);

}  // namespace dsn
