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

// Random instances and brute-force oracles shared by the unit tests and the
// acceptance suite. Everything here is written independently of the library's
// incremental paths: values come from plain loops over the definitions.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "dsn/component.hpp"
#include "dsn/embedder.hpp"
#include "dsn/mixture.hpp"
#include "dsn/numerics.hpp"

namespace dsn::testing {

inline Matrix random_normal(SeededRng& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = scale * rng.normal();
  return m;
}

inline Matrix random_positive_rows(SeededRng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = rng.uniform(0.05, 1.0);
  return normalize_rows(m);
}

// A ground set with raw features, an embedder and (optionally) queries.
struct Problem {
  EmbedderParams params;
  Matrix raw;
  Matrix queries;
  KernelState state;

  void refresh() { state = make_kernel_state(params, raw, queries); }
};

inline Problem random_problem(SeededRng& rng, std::size_t n, std::size_t d, std::size_t h,
                              std::size_t num_queries) {
  Problem p;
  p.params.theta = random_normal(rng, d, h);
  p.raw = random_normal(rng, n, d);
  p.queries = num_queries ? random_positive_rows(rng, num_queries, h) : Matrix(0, h);
  p.refresh();
  return p;
}

inline ComponentSpec random_spec(SeededRng& rng, Kind kind, std::size_t h) {
  switch (kind) {
    case Kind::kFL:
    case Kind::kGCMI:
      return ComponentSpec::make(kind);
    case Kind::kFLP:
      return ComponentSpec::make(kind, rng.uniform(0.05, 1.0));
    case Kind::kSC:
      return ComponentSpec::make(kind, rng.uniform(0.05, 0.95));
    case Kind::kGC:
      return ComponentSpec::make(kind, rng.uniform(0.05, 0.95));
    case Kind::kFL1MI:
    case Kind::kFL2MI:
      return ComponentSpec::make(kind, rng.uniform(0.05, 2.0));
    case Kind::kFB: {
      std::vector<double> gamma(h);
      for (double& g : gamma) g = rng.uniform(0.0, 1.0);
      const std::size_t pick = rng.below(3);
      Concave psi = pick == 0   ? Concave::parse("sqrt")
                    : pick == 1 ? Concave::parse("log1p")
                                : Concave::parse("min", rng.uniform(0.2, 1.5));
      return ComponentSpec::feature_based(std::move(gamma), psi);
    }
  }
  return ComponentSpec::make(Kind::kFL);
}

inline const std::vector<Kind>& all_kinds() {
  static const std::vector<Kind> kinds = {Kind::kFL, Kind::kFLP, Kind::kSC,    Kind::kGC,
                                          Kind::kFB, Kind::kGCMI, Kind::kFL1MI, Kind::kFL2MI};
  return kinds;
}

inline bool is_monotone_kind(Kind k) { return k != Kind::kFLP && k != Kind::kGC; }

// Uniformly random subset of {0..n-1} of the given size, ascending.
inline ItemSet random_subset(SeededRng& rng, std::size_t n, std::size_t size) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = 0; i < size; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  ItemSet out(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
  std::sort(out.begin(), out.end());
  return out;
}

// Random model over the given kinds; mixture or (optionally) composition.
inline DsnModel random_model(SeededRng& rng, Mode mode, const std::vector<Kind>& kinds,
                             const EmbedderParams& params, bool composition) {
  DsnModel m;
  m.mode = mode;
  m.embedder = params;
  for (Kind k : kinds) m.components.push_back(random_spec(rng, k, params.hidden_dim()));
  if (composition) {
    Composition c;
    const std::size_t units = 1 + rng.below(3);
    for (std::size_t p = 0; p < units; ++p) {
      const std::size_t pick = rng.below(3);
      c.outer.push_back(pick == 0   ? Concave::parse("sqrt")
                        : pick == 1 ? Concave::parse("log1p")
                                    : Concave::parse("min", rng.uniform(1.0, 6.0)));
    }
    c.weights = Matrix(units, kinds.size());
    for (double& w : c.weights.data()) w = rng.uniform(0.0, 1.0);
    m.composition = std::move(c);
  } else {
    for (std::size_t i = 0; i < kinds.size(); ++i) m.weights.push_back(rng.uniform(0.0, 1.0));
  }
  return m;
}

// Every subset of size k, in lexicographic order.
inline void for_each_subset(std::size_t n, std::size_t k,
                            const std::function<void(const ItemSet&)>& fn) {
  ItemSet idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Smallest gap between competing branches of any max/min the component
// evaluates at `set`. Smooth kinds return +inf.
inline double tie_margin(const ComponentSpec& spec, const KernelState& st, const ItemSet& set) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Matrix& s = st.similarity;
  const Matrix& sq = st.query_similarity;
  const std::size_t n = st.size();
  const std::size_t m = st.num_queries();
  double margin = kInf;
  auto top_two = [](const std::vector<double>& v) {
    double a = -kInf, b = -kInf;
    for (double x : v) {
      if (x > a) {
        b = a;
        a = x;
      } else if (x > b) {
        b = x;
      }
    }
    return std::pair<double, double>(a, b);
  };
  auto fl_gaps = [&](std::vector<double>* best) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v;
      for (std::size_t j : set) v.push_back(s(i, j));
      const auto [a, b] = top_two(v);
      if (v.size() >= 2) margin = std::min(margin, a - b);
      if (best) best->push_back(v.empty() ? 0.0 : a);
    }
  };
  auto query_gaps_for = [&](std::size_t i) {
    std::vector<double> v;
    for (std::size_t q = 0; q < m; ++q) v.push_back(sq(i, q));
    const auto [a, b] = top_two(v);
    if (v.size() >= 2) margin = std::min(margin, a - b);
    return v.empty() ? 0.0 : a;
  };
  switch (spec.kind) {
    case Kind::kFL:
    case Kind::kFLP:
      fl_gaps(nullptr);
      break;
    case Kind::kSC:
      for (std::size_t i = 0; i < n; ++i) {
        double cover = 0.0, total = 0.0;
        for (std::size_t j : set) cover += s(i, j);
        for (std::size_t j = 0; j < n; ++j) total += s(i, j);
        margin = std::min(margin, std::abs(cover - spec.lambda * total));
      }
      break;
    case Kind::kFL1MI: {
      std::vector<double> best;
      fl_gaps(&best);
      for (std::size_t i = 0; i < n; ++i) {
        const double qm = query_gaps_for(i);
        if (!set.empty()) margin = std::min(margin, std::abs(best[i] - spec.lambda * qm));
      }
      break;
    }
    case Kind::kFL2MI:
      for (std::size_t q = 0; q < m; ++q) {
        std::vector<double> v;
        for (std::size_t j : set) v.push_back(sq(j, q));
        const auto [a, b] = top_two(v);
        if (v.size() >= 2) margin = std::min(margin, a - b);
      }
      for (std::size_t i : set) query_gaps_for(i);
      break;
    case Kind::kFB:
      if (spec.psi.type == Concave::Type::kMinCap) {
        const Matrix& x = st.features();
        for (std::size_t t = 0; t < x.cols(); ++t) {
          double mass = 0.0;
          for (std::size_t a : set) mass += x(a, t);
          margin = std::min(margin, std::abs(mass - spec.psi.cap));
        }
      }
      break;
    case Kind::kGC:
    case Kind::kGCMI:
      break;
  }
  return margin;
}

// Relative error of an analytic vector against a finite-difference one.
inline double relative_error(const std::vector<double>& analytic,
                             const std::vector<double>& numeric) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    ref += numeric[i] * numeric[i];
  }
  diff = std::sqrt(diff);
  ref = std::sqrt(ref);
  if (ref < 1e-8) return diff;  // both essentially zero: compare absolutely
  return diff / ref;
}

// Central differences of fn over every entry of `x`, restoring it afterwards.
inline std::vector<double> central_differences(std::vector<double>& x,
                                               const std::function<double()>& fn,
                                               double step = 1e-5) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = fn();
    x[i] = saved - step;
    const double down = fn();
    x[i] = saved;
    out[i] = (up - down) / (2.0 * step);
  }
  return out;
}

}  // namespace dsn::testing
