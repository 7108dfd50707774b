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

#include "dsn/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dsn/error.hpp"

namespace dsn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows * cols, ErrorCode::kShapeMismatch,
          "matrix data length " + std::to_string(data_.size()) +
              " does not match " + std::to_string(rows) + "x" +
              std::to_string(cols));
}

void Matrix::fill(double value) {
  for (auto& x : data_) x = value;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  axpy(1.0, other);
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  axpy(-1.0, other);
  return *this;
}

Matrix& Matrix::operator*=(double scale) {
  for (auto& x : data_) x *= scale;
  return *this;
}

void Matrix::axpy(double scale, const Matrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_,
          ErrorCode::kShapeMismatch, "matrix shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

bool Matrix::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double Matrix::frobenius_norm() const { return l2_norm(data_); }

Matrix operator-(Matrix lhs, const Matrix& rhs) {
  lhs -= rhs;
  return lhs;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) {
  lhs += rhs;
  return lhs;
}

double sigmoid(double x) {
  // Largest double below one; keeps outputs strictly inside (0, 1).
  constexpr double kUpper = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  if (x >= 0) {
    double y = 1.0 / (1.0 + std::exp(-x));
    return y < kUpper ? y : kUpper;
  }
  double e = std::exp(x);
  double y = e / (1.0 + e);
  return y > 0 ? y : std::numeric_limits<double>::denorm_min();
}

std::vector<double> sigmoid(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sigmoid(x[i]);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::kShapeMismatch, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t SeededRng::below(std::size_t n) {
  require(n > 0, ErrorCode::kInvalidArgument, "below(0)");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

double SeededRng::normal() {
  // Box-Muller, one value per call.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix xavier_init(SeededRng& rng, std::size_t rows, std::size_t cols) {
  require(rows >= 1 && cols >= 1, ErrorCode::kInvalidArgument,
          "xavier_init: dimensions must be positive");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (auto& x : m.data()) x = rng.uniform(-bound, bound);
  return m;
}

AdamState::AdamState(std::size_t num_params, double lr0_, double decay_)
    : first_moment(num_params, 0.0),
      second_moment(num_params, 0.0),
      lr0(lr0_),
      decay(decay_) {}

double AdamState::learning_rate(std::size_t epoch) const {
  return lr0 / (1.0 + decay * static_cast<double>(epoch));
}

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads, std::size_t epoch) {
  require(params.size() == grads.size() &&
              state.first_moment.size() == params.size() &&
              state.second_moment.size() == params.size(),
          ErrorCode::kShapeMismatch, "adam_step: shape mismatch");
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double lr = state.learning_rate(epoch);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * grads[i];
    v = state.beta2 * v + (1.0 - state.beta2) * grads[i] * grads[i];
    const double m_hat = m / c1;
    const double v_hat = v / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

void adam_step(AdamState& state, Matrix& params, const Matrix& grads,
               std::size_t epoch) {
  require(params.rows() == grads.rows() && params.cols() == grads.cols(),
          ErrorCode::kShapeMismatch, "adam_step: matrix shape mismatch");
  adam_step(state, std::span<double>(params.data()),
            std::span<const double>(grads.data()), epoch);
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kMalformedFile: return "malformed_file";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kIdOutOfRange: return "id_out_of_range";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kModeMismatch: return "mode_mismatch";
    case ErrorCode::kNumerical: return "numerical";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace dsn
