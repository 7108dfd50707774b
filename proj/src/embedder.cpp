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

#include "dsn/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsn/error.hpp"
#include "dsn/parallel.hpp"

namespace dsn {
namespace {

struct Forward {
  std::vector<double> z;
  double norm = 0.0;
  std::vector<double> x;
};

Forward forward_one(const EmbedderParams& params, std::span<const double> raw) {
  const std::size_t d = params.input_dim();
  const std::size_t h = params.hidden_dim();
  require(raw.size() == d, ErrorCode::kDimensionMismatch,
          "embed: raw feature length " + std::to_string(raw.size()) +
              " != embedder input dim " + std::to_string(d));
  Forward f;
  std::vector<double> a(h, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    const double u = raw[r];
    auto theta_row = params.theta.row(r);
    for (std::size_t t = 0; t < h; ++t) a[t] += theta_row[t] * u;
  }
  f.z = sigmoid(a);
  f.norm = l2_norm(f.z);
  f.x.resize(h);
  for (std::size_t t = 0; t < h; ++t) f.x[t] = f.z[t] / f.norm;
  return f;
}

// Writes the back-propagated pre-activation gradient for one item given the
// gradient with respect to its unit feature vector.
void unit_to_preactivation(std::span<const double> z, double norm,
                           std::span<const double> x, std::span<double> g) {
  const double proj = dot(x, g);
  for (std::size_t t = 0; t < g.size(); ++t) {
    g[t] = (g[t] - proj * x[t]) / norm * z[t] * (1.0 - z[t]);
  }
}

void add_outer(Matrix& out, std::span<const double> raw, std::span<const double> g) {
  for (std::size_t r = 0; r < raw.size(); ++r) {
    auto row = out.row(r);
    for (std::size_t t = 0; t < g.size(); ++t) row[t] += raw[r] * g[t];
  }
}

}  // namespace

Embedding embed_full(const EmbedderParams& params, const Matrix& raw) {
  require(params.hidden_dim() >= 1, ErrorCode::kInvalidArgument,
          "embedder needs at least one hidden unit");
  require(raw.cols() == params.input_dim(), ErrorCode::kDimensionMismatch,
          "embed: raw feature dim " + std::to_string(raw.cols()) +
              " != embedder input dim " + std::to_string(params.input_dim()));
  const std::size_t n = raw.rows();
  const std::size_t h = params.hidden_dim();
  Embedding e{Matrix(n, h), std::vector<double>(n), Matrix(n, h)};
  parallel_for(n, [&](std::size_t i) {
    Forward f = forward_one(params, raw.row(i));
    std::copy(f.z.begin(), f.z.end(), e.activations.row(i).begin());
    std::copy(f.x.begin(), f.x.end(), e.features.row(i).begin());
    e.norms[i] = f.norm;
  });
  return e;
}

Matrix embed(const EmbedderParams& params, const Matrix& raw) {
  return embed_full(params, raw).features;
}

Matrix cosine_kernel(const Matrix& features) {
  const std::size_t n = features.rows();
  Matrix s(n, n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = dot(features.row(i), features.row(j));
      s(i, j) = v;
      s(j, i) = v;
    }
  });
  return s;
}

Matrix query_kernel(const Matrix& features, const Matrix& queries) {
  const std::size_t n = features.rows();
  const std::size_t m = queries.rows();
  if (m == 0) return Matrix(n, 0);
  require(queries.cols() == features.cols(), ErrorCode::kDimensionMismatch,
          "query dim " + std::to_string(queries.cols()) +
              " != embedding dim " + std::to_string(features.cols()));
  for (std::size_t q = 0; q < m; ++q) {
    require(std::abs(l2_norm(queries.row(q)) - 1.0) < 1e-9,
            ErrorCode::kInvalidArgument, "query rows must be unit length");
  }
  Matrix sq(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = 0; q < m; ++q) sq(i, q) = dot(features.row(i), queries.row(q));
  }
  return sq;
}

Matrix normalize_rows(const Matrix& queries) {
  Matrix out = queries;
  for (std::size_t q = 0; q < out.rows(); ++q) {
    auto row = out.row(q);
    const double norm = l2_norm(row);
    require(norm > 0 && std::isfinite(norm), ErrorCode::kInvalidArgument,
            "cannot normalize a zero or non-finite query row");
    for (double& v : row) v /= norm;
  }
  return out;
}

Matrix kernel_grad_theta(const EmbedderParams& params,
                         std::span<const double> raw_i,
                         std::span<const double> raw_j) {
  Matrix grad(params.input_dim(), params.hidden_dim());
  // s_ii is identically one.
  if (std::equal(raw_i.begin(), raw_i.end(), raw_j.begin(), raw_j.end())) return grad;
  const Forward fi = forward_one(params, raw_i);
  const Forward fj = forward_one(params, raw_j);
  std::vector<double> gi = fj.x;
  std::vector<double> gj = fi.x;
  unit_to_preactivation(fi.z, fi.norm, fi.x, gi);
  unit_to_preactivation(fj.z, fj.norm, fj.x, gj);
  add_outer(grad, raw_i, gi);
  add_outer(grad, raw_j, gj);
  return grad;
}

Matrix query_kernel_grad_theta(const EmbedderParams& params,
                               std::span<const double> raw_i,
                               std::span<const double> query) {
  require(query.size() == params.hidden_dim(), ErrorCode::kDimensionMismatch,
          "query dim must equal hidden dim");
  const Forward fi = forward_one(params, raw_i);
  std::vector<double> g(query.begin(), query.end());
  unit_to_preactivation(fi.z, fi.norm, fi.x, g);
  Matrix grad(params.input_dim(), params.hidden_dim());
  add_outer(grad, raw_i, g);
  return grad;
}

Matrix feature_grad_theta(const EmbedderParams& params,
                          std::span<const double> raw_i, std::size_t t) {
  require(t < params.hidden_dim(), ErrorCode::kIdOutOfRange, "feature index out of range");
  const Forward fi = forward_one(params, raw_i);
  std::vector<double> g(params.hidden_dim(), 0.0);
  g[t] = 1.0;
  unit_to_preactivation(fi.z, fi.norm, fi.x, g);
  Matrix grad(params.input_dim(), params.hidden_dim());
  add_outer(grad, raw_i, g);
  return grad;
}

namespace {

void fill_totals(KernelState& state) {
  const std::size_t n = state.similarity.rows();
  const std::size_t m = state.query_similarity.cols();
  state.row_total.assign(n, 0.0);
  state.col_total.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      state.row_total[i] += state.similarity(i, j);
      state.col_total[j] += state.similarity(i, j);
    }
  }
  state.query_max.assign(n, 0.0);
  state.query_argmax.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = 0; q < m; ++q) {
      const double v = state.query_similarity(i, q);
      if (q == 0 || v > state.query_max[i]) {
        state.query_max[i] = v;
        state.query_argmax[i] = q;
      }
    }
  }
}

}  // namespace

KernelState make_kernel_state(const EmbedderParams& params, const Matrix& raw,
                              const Matrix& queries) {
  KernelState state;
  state.embedding = embed_full(params, raw);
  state.similarity = cosine_kernel(state.embedding.features);
  for (std::size_t i = 0; i < state.similarity.rows(); ++i) state.similarity(i, i) = 1.0;
  if (queries.rows() > 0) {
    state.queries = normalize_rows(queries);
    state.query_similarity = query_kernel(state.embedding.features, state.queries);
  } else {
    state.queries = Matrix(0, params.hidden_dim());
    state.query_similarity = Matrix(raw.rows(), 0);
  }
  fill_totals(state);
  return state;
}

KernelState kernel_state_from(Matrix similarity, Matrix query_similarity,
                              Matrix features) {
  const std::size_t n = similarity.rows();
  require(similarity.cols() == n, ErrorCode::kShapeMismatch, "S must be square");
  if (query_similarity.rows() == 0) query_similarity = Matrix(n, 0);
  if (features.rows() == 0) features = Matrix(n, 0);
  require(query_similarity.rows() == n && features.rows() == n,
          ErrorCode::kShapeMismatch, "kernel matrices disagree on n");
  KernelState state;
  state.embedding.features = std::move(features);
  state.similarity = std::move(similarity);
  state.query_similarity = std::move(query_similarity);
  fill_totals(state);
  return state;
}

KernelSensitivity::KernelSensitivity(const KernelState& state)
    : d_similarity(state.size(), state.size()),
      d_query_similarity(state.size(), state.num_queries()),
      d_features(state.size(), state.features().cols()) {}

Matrix backprop_theta(const EmbedderParams& params, const Matrix& raw,
                      const KernelState& state,
                      const KernelSensitivity& sens) {
  const std::size_t n = state.size();
  const std::size_t m = state.num_queries();
  const std::size_t h = params.hidden_dim();
  const std::size_t d = params.input_dim();
  const Matrix& x = state.embedding.features;
  require(raw.rows() == n && raw.cols() == d, ErrorCode::kShapeMismatch,
          "backprop_theta: raw features do not match state");
  require(sens.d_similarity.rows() == n && sens.d_features.cols() == h,
          ErrorCode::kShapeMismatch, "backprop_theta: sensitivity shape");

  // Gradient with respect to the pre-activations, one row per item.
  Matrix g(n, h);
  parallel_for(n, [&](std::size_t i) {
    auto gi = g.row(i);
    auto dx = sens.d_features.row(i);
    std::copy(dx.begin(), dx.end(), gi.begin());
    for (std::size_t j = 0; j < n; ++j) {
      const double c = sens.d_similarity(i, j) + sens.d_similarity(j, i);
      if (c == 0.0) continue;
      auto xj = x.row(j);
      for (std::size_t t = 0; t < h; ++t) gi[t] += c * xj[t];
    }
    for (std::size_t q = 0; q < m; ++q) {
      const double c = sens.d_query_similarity(i, q);
      if (c == 0.0) continue;
      auto qr = state.queries.row(q);
      for (std::size_t t = 0; t < h; ++t) gi[t] += c * qr[t];
    }
    unit_to_preactivation(state.embedding.activations.row(i), state.embedding.norms[i],
                          x.row(i), gi);
  });

  Matrix grad(d, h);
  parallel_for(d, [&](std::size_t r) {
    auto out = grad.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = raw(i, r);
      if (u == 0.0) continue;
      auto gi = g.row(i);
      for (std::size_t t = 0; t < h; ++t) out[t] += u * gi[t];
    }
  });
  return grad;
}

Matrix ExactKernelGradProvider::grad_similarity(std::size_t i, std::size_t j) const {
  if (i == j) return Matrix(input_dim(), hidden_dim());
  return kernel_grad_theta(params_, raw_.row(i), raw_.row(j));
}

Matrix ExactKernelGradProvider::grad_query_similarity(std::size_t i, std::size_t q) const {
  return query_kernel_grad_theta(params_, raw_.row(i), queries_.row(q));
}

Matrix ExactKernelGradProvider::grad_feature(std::size_t i, std::size_t t) const {
  return feature_grad_theta(params_, raw_.row(i), t);
}

Matrix contract_sensitivity(const KernelGradProvider& provider,
                            const KernelSensitivity& sens) {
  Matrix grad(provider.input_dim(), provider.hidden_dim());
  const Matrix& ds = sens.d_similarity;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < ds.cols(); ++j) {
      if (ds(i, j) != 0.0) grad.axpy(ds(i, j), provider.grad_similarity(i, j));
    }
  }
  const Matrix& dq = sens.d_query_similarity;
  for (std::size_t i = 0; i < dq.rows(); ++i) {
    for (std::size_t q = 0; q < dq.cols(); ++q) {
      if (dq(i, q) != 0.0) grad.axpy(dq(i, q), provider.grad_query_similarity(i, q));
    }
  }
  const Matrix& dx = sens.d_features;
  for (std::size_t i = 0; i < dx.rows(); ++i) {
    for (std::size_t t = 0; t < dx.cols(); ++t) {
      if (dx(i, t) != 0.0) grad.axpy(dx(i, t), provider.grad_feature(i, t));
    }
  }
  return grad;
}

}  // namespace dsn
