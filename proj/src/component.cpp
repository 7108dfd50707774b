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

#include "dsn/component.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsn/error.hpp"
#include "dsn/smi.hpp"
#include "dsn/submodular.hpp"

namespace dsn {
namespace {

// Smallest admissible saturation fraction; SC requires lambda > 0.
constexpr double kMinSaturation = 1e-6;

}  // namespace

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::kFL: return "FL";
    case Kind::kFLP: return "FLP";
    case Kind::kSC: return "SC";
    case Kind::kGC: return "GC";
    case Kind::kFB: return "FB";
    case Kind::kGCMI: return "GCMI";
    case Kind::kFL1MI: return "FL1MI";
    case Kind::kFL2MI: return "FL2MI";
  }
  return "?";
}

Kind parse_kind(std::string_view name) {
  for (Kind k : {Kind::kFL, Kind::kFLP, Kind::kSC, Kind::kGC, Kind::kFB, Kind::kGCMI,
                 Kind::kFL1MI, Kind::kFL2MI}) {
    if (kind_name(k) == name) return k;
  }
  fail(ErrorCode::kInvalidArgument, "unknown component kind '" + std::string(name) + "'");
}

bool is_query_kind(Kind kind) {
  return kind == Kind::kGCMI || kind == Kind::kFL1MI || kind == Kind::kFL2MI;
}

double Concave::value(double x) const {
  switch (type) {
    case Type::kSqrt: return std::sqrt(std::max(x, 0.0));
    case Type::kLog1p: return std::log1p(x);
    case Type::kMinCap: return std::min(x, cap);
  }
  return 0.0;
}

double Concave::derivative(double x) const {
  switch (type) {
    case Type::kSqrt: return x > 0.0 ? 0.5 / std::sqrt(x) : 0.0;
    case Type::kLog1p: return 1.0 / (1.0 + x);
    case Type::kMinCap: return x < cap ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string Concave::name() const {
  switch (type) {
    case Type::kSqrt: return "sqrt";
    case Type::kLog1p: return "log1p";
    case Type::kMinCap: return "min";
  }
  return "?";
}

Concave Concave::parse(std::string_view name, double cap) {
  if (name == "sqrt") return {Type::kSqrt, 1.0};
  if (name == "log1p") return {Type::kLog1p, 1.0};
  if (name == "min") {
    require(cap > 0.0, ErrorCode::kInvalidArgument, "min cap must be positive");
    return {Type::kMinCap, cap};
  }
  fail(ErrorCode::kInvalidArgument, "unknown concave function '" + std::string(name) + "'");
}

ComponentSpec ComponentSpec::make(Kind kind, double lambda) {
  require(kind != Kind::kFB, ErrorCode::kInvalidArgument,
          "use ComponentSpec::feature_based for FB");
  ComponentSpec spec;
  spec.kind = kind;
  spec.lambda = lambda;
  spec.validate();
  return spec;
}

ComponentSpec ComponentSpec::feature_based(std::vector<double> gamma, Concave psi) {
  ComponentSpec spec;
  spec.kind = Kind::kFB;
  spec.gamma = std::move(gamma);
  spec.psi = psi;
  spec.validate();
  return spec;
}

std::size_t ComponentSpec::num_params() const {
  switch (kind) {
    case Kind::kFL:
    case Kind::kGCMI:
      return 0;
    case Kind::kFB:
      return gamma.size();
    default:
      return 1;
  }
}

std::vector<double> ComponentSpec::params() const {
  if (kind == Kind::kFB) return gamma;
  if (num_params() == 0) return {};
  return {lambda};
}

void ComponentSpec::set_params(std::span<const double> values) {
  require(values.size() == num_params(), ErrorCode::kShapeMismatch,
          "parameter count mismatch for " + std::string(kind_name(kind)));
  if (kind == Kind::kFB) {
    gamma.assign(values.begin(), values.end());
  } else if (!values.empty()) {
    lambda = values[0];
  }
  project();
}

void ComponentSpec::project() {
  switch (kind) {
    case Kind::kSC:
      lambda = std::clamp(lambda, kMinSaturation, 1.0);
      break;
    case Kind::kGC:
      lambda = std::clamp(lambda, 0.0, 1.0);
      break;
    case Kind::kFLP:
    case Kind::kFL1MI:
    case Kind::kFL2MI:
      lambda = std::max(lambda, 0.0);
      break;
    case Kind::kFB:
      for (double& g : gamma) g = std::max(g, 0.0);
      break;
    case Kind::kFL:
    case Kind::kGCMI:
      break;
  }
}

void ComponentSpec::validate() const {
  const std::string name(kind_name(kind));
  require(std::isfinite(lambda), ErrorCode::kInvalidArgument, name + ": lambda not finite");
  switch (kind) {
    case Kind::kSC:
      require(lambda > 0.0 && lambda <= 1.0, ErrorCode::kInvalidArgument,
              "SC: lambda must lie in (0, 1]");
      break;
    case Kind::kGC:
      require(lambda >= 0.0 && lambda <= 1.0, ErrorCode::kInvalidArgument,
              "GC: lambda must lie in [0, 1]");
      break;
    case Kind::kFLP:
    case Kind::kFL1MI:
    case Kind::kFL2MI:
      require(lambda >= 0.0, ErrorCode::kInvalidArgument, name + ": lambda must be >= 0");
      break;
    case Kind::kFB:
      for (double g : gamma) {
        require(g >= 0.0 && std::isfinite(g), ErrorCode::kInvalidArgument,
                "FB: gamma must be nonnegative");
      }
      break;
    case Kind::kFL:
    case Kind::kGCMI:
      break;
  }
}

void validate_set(const ItemSet& set, std::size_t n) {
  std::vector<char> seen(n, 0);
  for (std::size_t v : set) {
    require(v < n, ErrorCode::kIdOutOfRange,
            "item id " + std::to_string(v) + " outside ground set of size " +
                std::to_string(n));
    require(!seen[v], ErrorCode::kDuplicateId, "item id " + std::to_string(v) + " repeated");
    seen[v] = 1;
  }
}

double evaluate(const ComponentSpec& spec, const KernelState& state, const ItemSet& set) {
  const Matrix& s = state.similarity;
  switch (spec.kind) {
    case Kind::kFL: return eval_fl(s, set);
    case Kind::kFLP: return eval_flp(s, set, spec.lambda);
    case Kind::kSC: return eval_sc(s, set, spec.lambda);
    case Kind::kGC: return eval_gc(s, set, spec.lambda);
    case Kind::kFB: return eval_fb(state.features(), set, spec.gamma, spec.psi);
    case Kind::kGCMI: return eval_gcmi(state.query_similarity, set);
    case Kind::kFL1MI: return eval_fl1mi(s, state.query_similarity, set, spec.lambda);
    case Kind::kFL2MI: return eval_fl2mi(state.query_similarity, set, spec.lambda);
  }
  return 0.0;
}

std::vector<double> subgrad_params(const ComponentSpec& spec, const KernelState& state,
                                   const ItemSet& set) {
  validate_set(set, state.size());
  const Matrix& s = state.similarity;
  switch (spec.kind) {
    case Kind::kFL:
    case Kind::kGCMI:
      return {};
    case Kind::kFLP: return {detail::lambda_grad_flp(s, set)};
    case Kind::kSC: return {detail::lambda_grad_sc(state, set, spec.lambda)};
    case Kind::kGC: return {detail::lambda_grad_gc(s, set)};
    case Kind::kFB: return detail::gamma_grad_fb(state.features(), set, spec.psi);
    case Kind::kFL1MI: return {detail::lambda_grad_fl1mi(state, set, spec.lambda)};
    case Kind::kFL2MI: return {detail::lambda_grad_fl2mi(state, set)};
  }
  return {};
}

void accumulate_sensitivity(const ComponentSpec& spec, const KernelState& state,
                            const ItemSet& set, double scale, KernelSensitivity& out) {
  validate_set(set, state.size());
  if (scale == 0.0) return;
  const Matrix& s = state.similarity;
  switch (spec.kind) {
    case Kind::kFL:
      detail::sensitivity_fl(s, set, scale, out.d_similarity);
      break;
    case Kind::kFLP:
      detail::sensitivity_flp(s, set, spec.lambda, scale, out.d_similarity);
      break;
    case Kind::kSC:
      detail::sensitivity_sc(state, set, spec.lambda, scale, out.d_similarity);
      break;
    case Kind::kGC:
      detail::sensitivity_gc(s, set, spec.lambda, scale, out.d_similarity);
      break;
    case Kind::kFB:
      detail::sensitivity_fb(state.features(), set, spec.gamma, spec.psi, scale,
                             out.d_features);
      break;
    case Kind::kGCMI:
      detail::sensitivity_gcmi(state.query_similarity, set, scale, out.d_query_similarity);
      break;
    case Kind::kFL1MI:
      detail::sensitivity_fl1mi(state, set, spec.lambda, scale, out.d_similarity,
                                out.d_query_similarity);
      break;
    case Kind::kFL2MI:
      detail::sensitivity_fl2mi(state, set, spec.lambda, scale, out.d_query_similarity);
      break;
  }
}

Matrix subgrad_theta(const ComponentSpec& spec, const KernelState& state,
                     const ItemSet& set, const EmbedderParams& params, const Matrix& raw) {
  KernelSensitivity sens(state);
  accumulate_sensitivity(spec, state, set, 1.0, sens);
  return backprop_theta(params, raw, state, sens);
}

Matrix subgrad_theta(const ComponentSpec& spec, const KernelState& state,
                     const ItemSet& set, const KernelGradProvider& provider) {
  KernelSensitivity sens(state);
  accumulate_sensitivity(spec, state, set, 1.0, sens);
  return contract_sensitivity(provider, sens);
}

GreedyCache::GreedyCache(const ComponentSpec& spec, const KernelState& state)
    : spec_(&spec), state_(&state), in_set_(state.size(), 0) {
  const std::size_t n = state.size();
  switch (spec.kind) {
    case Kind::kFL:
    case Kind::kFL1MI:
      best_.assign(n, 0.0);
      break;
    case Kind::kFLP:
      best_.assign(n, 0.0);
      row_sum_.assign(n, 0.0);
      col_sum_.assign(n, 0.0);
      break;
    case Kind::kSC:
    case Kind::kGC:
      row_sum_.assign(n, 0.0);
      col_sum_.assign(n, 0.0);
      break;
    case Kind::kFB:
      require(spec.gamma.size() == state.features().cols(), ErrorCode::kDimensionMismatch,
              "FB: gamma length does not match feature dim");
      mass_.assign(state.features().cols(), 0.0);
      break;
    case Kind::kFL2MI:
      query_best_.assign(state.num_queries(), 0.0);
      break;
    case Kind::kGCMI:
      break;
  }
}

double GreedyCache::gain(std::size_t v) const {
  const KernelState& st = *state_;
  const Matrix& s = st.similarity;
  const std::size_t n = st.size();
  require(v < n, ErrorCode::kIdOutOfRange, "gain: item id out of range");
  require(!in_set_[v], ErrorCode::kDuplicateId,
          "gain: item " + std::to_string(v) + " already selected");
  const bool empty = selected_.empty();
  const double lambda = spec_->lambda;

  auto fl_gain = [&] {
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g += empty ? s(i, v) : std::max(0.0, s(i, v) - best_[i]);
    }
    return g;
  };
  auto pair_delta = [&] { return row_sum_[v] + col_sum_[v] + s(v, v); };

  switch (spec_->kind) {
    case Kind::kFL:
      return fl_gain();
    case Kind::kFLP:
      return fl_gain() - lambda * pair_delta();
    case Kind::kSC: {
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double cap = lambda * st.row_total[i];
        g += std::min(row_sum_[i] + s(i, v), cap) - (empty ? 0.0 : std::min(row_sum_[i], cap));
      }
      return g;
    }
    case Kind::kGC:
      return lambda * st.col_total[v] - pair_delta();
    case Kind::kFB: {
      const Matrix& f = st.features();
      double g = 0.0;
      for (std::size_t t = 0; t < mass_.size(); ++t) {
        const double x = f(v, t);
        require(x >= 0.0, ErrorCode::kInvalidArgument, "FB: negative feature value");
        g += spec_->gamma[t] * (spec_->psi.value(mass_[t] + x) - spec_->psi.value(mass_[t]));
      }
      return g;
    }
    case Kind::kGCMI: {
      double g = 0.0;
      for (std::size_t q = 0; q < st.num_queries(); ++q) g += st.query_similarity(v, q);
      return 2.0 * g;
    }
    case Kind::kFL1MI: {
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double cap = lambda * st.query_max[i];
        const double updated = empty ? s(i, v) : std::max(best_[i], s(i, v));
        g += std::min(updated, cap) - (empty ? 0.0 : std::min(best_[i], cap));
      }
      return g;
    }
    case Kind::kFL2MI: {
      double g = 0.0;
      const Matrix& sq = st.query_similarity;
      for (std::size_t q = 0; q < sq.cols(); ++q) {
        g += empty ? sq(v, q) : std::max(0.0, sq(v, q) - query_best_[q]);
      }
      return g + lambda * st.query_max[v];
    }
  }
  return 0.0;
}

void GreedyCache::insert(std::size_t v) {
  const double g = gain(v);
  const KernelState& st = *state_;
  const Matrix& s = st.similarity;
  const std::size_t n = st.size();
  const bool empty = selected_.empty();
  if (!best_.empty()) {
    for (std::size_t i = 0; i < n; ++i) best_[i] = empty ? s(i, v) : std::max(best_[i], s(i, v));
  }
  if (!row_sum_.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      row_sum_[i] += s(i, v);
      col_sum_[i] += s(v, i);
    }
  }
  if (!mass_.empty()) {
    const Matrix& f = st.features();
    for (std::size_t t = 0; t < mass_.size(); ++t) mass_[t] += f(v, t);
  }
  if (!query_best_.empty()) {
    const Matrix& sq = st.query_similarity;
    for (std::size_t q = 0; q < sq.cols(); ++q) {
      query_best_[q] = empty ? sq(v, q) : std::max(query_best_[q], sq(v, q));
    }
  }
  in_set_[v] = 1;
  selected_.push_back(v);
  value_ += g;
}

}  // namespace dsn
