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

// Small dense numerics used throughout: a row-major matrix, sigmoid, a
// portable seeded RNG, Xavier initialization and an Adam optimizer.
//
// All reductions run in index order so results are reproducible bit for bit.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dsn {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double value);
  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scale);
  // this += scale * other
  void axpy(double scale, const Matrix& other);

  bool all_finite() const;
  double frobenius_norm() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator+(Matrix lhs, const Matrix& rhs);

double sigmoid(double x);
std::vector<double> sigmoid(std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

// Explicitly seeded 64-bit generator. Uniform and normal draws are derived
// from the raw 64-bit stream here rather than through <random>
// distributions, whose output is implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::size_t below(std::size_t n);
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

Matrix xavier_init(SeededRng& rng, std::size_t rows, std::size_t cols);

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step_count = 0;
  double lr0 = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double decay = 0.0;

  AdamState() = default;
  AdamState(std::size_t num_params, double lr0, double decay);

  double learning_rate(std::size_t epoch) const;
};

// One bias-corrected Adam update of `params` in place using the learning
// rate lr0 / (1 + decay * epoch).
void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads, std::size_t epoch);
void adam_step(AdamState& state, Matrix& params, const Matrix& grads,
               std::size_t epoch);

}  // namespace dsn
