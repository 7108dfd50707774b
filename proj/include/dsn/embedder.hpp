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

// Shared feature extractor and the similarity kernels built on top of it.
//
// Forward pass for item i with raw features U_i (length d):
//   z_i = sigmoid(theta^T U_i)      (length h)
//   X_i = z_i / |z_i|
//   s_ij = <X_i, X_j>,  sq_iq = <X_i, q>   (queries are not embedded)
//
// Gradients with respect to theta are available two ways: per entry
// (kernel_grad_theta and friends) and batched through backprop_theta, which
// contracts a whole sensitivity matrix in O(n^2 h + n d h).

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dsn/numerics.hpp"

namespace dsn {

struct EmbedderParams {
  Matrix theta;  // d x h

  std::size_t input_dim() const { return theta.rows(); }
  std::size_t hidden_dim() const { return theta.cols(); }
};

struct Embedding {
  Matrix activations;         // z, n x h
  std::vector<double> norms;  // |z_i|
  Matrix features;            // X, n x h, unit rows
};

Embedding embed_full(const EmbedderParams& params, const Matrix& raw);
Matrix embed(const EmbedderParams& params, const Matrix& raw);

Matrix cosine_kernel(const Matrix& features);
// queries must have unit rows of the embedding width.
Matrix query_kernel(const Matrix& features, const Matrix& queries);

// Copy of `queries` with every row scaled to unit length.
Matrix normalize_rows(const Matrix& queries);

// d x h gradient of s_ij with respect to theta.
Matrix kernel_grad_theta(const EmbedderParams& params,
                         std::span<const double> raw_i,
                         std::span<const double> raw_j);
// d x h gradient of <X_i, q> with respect to theta; q held constant.
Matrix query_kernel_grad_theta(const EmbedderParams& params,
                               std::span<const double> raw_i,
                               std::span<const double> query);
// d x h gradient of X_{i,t} with respect to theta.
Matrix feature_grad_theta(const EmbedderParams& params,
                          std::span<const double> raw_i, std::size_t t);

// Everything a component needs to evaluate itself for one ground set under
// the current theta.
struct KernelState {
  Embedding embedding;
  Matrix similarity;        // S, n x n
  Matrix queries;           // unit rows, m x h (m may be 0)
  Matrix query_similarity;  // SQ, n x m
  std::vector<double> row_total;   // sum_j s_ij
  std::vector<double> col_total;   // sum_i s_ij
  std::vector<double> query_max;   // max_q sq_iq (0 when m = 0)
  std::vector<std::size_t> query_argmax;

  std::size_t size() const { return similarity.rows(); }
  std::size_t num_queries() const { return query_similarity.cols(); }
  const Matrix& features() const { return embedding.features; }
};

KernelState make_kernel_state(const EmbedderParams& params, const Matrix& raw,
                              const Matrix& queries = {});

// Builds a state directly from kernel matrices, bypassing the embedder.
// Used for evaluating functions on arbitrary S, SQ and feature matrices.
KernelState kernel_state_from(Matrix similarity, Matrix query_similarity = {},
                              Matrix features = {});

// Partial derivatives of some scalar with respect to S, SQ and X.
struct KernelSensitivity {
  Matrix d_similarity;
  Matrix d_query_similarity;
  Matrix d_features;

  KernelSensitivity() = default;
  explicit KernelSensitivity(const KernelState& state);
};

Matrix backprop_theta(const EmbedderParams& params, const Matrix& raw,
                      const KernelState& state,
                      const KernelSensitivity& sensitivity);

// Per-entry gradient source for the literal chain-rule aggregation.
class KernelGradProvider {
 public:
  virtual ~KernelGradProvider() = default;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t hidden_dim() const = 0;
  virtual Matrix grad_similarity(std::size_t i, std::size_t j) const = 0;
  virtual Matrix grad_query_similarity(std::size_t i, std::size_t q) const = 0;
  virtual Matrix grad_feature(std::size_t i, std::size_t t) const = 0;
};

class ExactKernelGradProvider : public KernelGradProvider {
 public:
  // queries should already be unit rows.
  ExactKernelGradProvider(const EmbedderParams& params, const Matrix& raw,
                          const Matrix& queries)
      : params_(params), raw_(raw), queries_(queries) {}

  std::size_t input_dim() const override { return params_.input_dim(); }
  std::size_t hidden_dim() const override { return params_.hidden_dim(); }
  Matrix grad_similarity(std::size_t i, std::size_t j) const override;
  Matrix grad_query_similarity(std::size_t i, std::size_t q) const override;
  Matrix grad_feature(std::size_t i, std::size_t t) const override;

 private:
  const EmbedderParams& params_;
  const Matrix& raw_;
  const Matrix& queries_;
};

// Aggregates sum of sensitivity entries times per-entry gradients.
Matrix contract_sensitivity(const KernelGradProvider& provider,
                            const KernelSensitivity& sensitivity);

}  // namespace dsn
