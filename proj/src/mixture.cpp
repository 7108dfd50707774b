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

#include "dsn/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "dsn/error.hpp"

namespace dsn {

using nlohmann::json;

std::string_view mode_name(Mode mode) {
  return mode == Mode::kQuery ? "query" : "generic";
}

Mode parse_mode(std::string_view name) {
  if (name == "generic") return Mode::kGeneric;
  if (name == "query") return Mode::kQuery;
  fail(ErrorCode::kInvalidArgument, "unknown mode '" + std::string(name) + "'");
}

std::span<double> DsnModel::combination_weights() {
  if (composition) return composition->weights.data();
  return weights;
}

std::span<const double> DsnModel::combination_weights() const {
  if (composition) return composition->weights.data();
  return weights;
}

void DsnModel::project() {
  for (double& w : combination_weights()) w = std::max(w, 0.0);
  for (auto& c : components) c.project();
}

void DsnModel::validate() const {
  require(!components.empty(), ErrorCode::kInvalidArgument, "model has no components");
  require(embedder.theta.rows() >= 1 && embedder.theta.cols() >= 1,
          ErrorCode::kInvalidArgument, "theta must be non-empty");
  require(embedder.theta.all_finite(), ErrorCode::kNumerical, "theta is not finite");
  if (composition) {
    require(composition->weights.rows() == composition->outer.size() &&
                composition->weights.cols() == components.size(),
            ErrorCode::kShapeMismatch, "composition weights must be P x M");
  } else {
    require(weights.size() == components.size(), ErrorCode::kShapeMismatch,
            "one weight per component required");
  }
  for (double w : combination_weights()) {
    require(w >= 0.0 && std::isfinite(w), ErrorCode::kInvalidArgument,
            "weights must be finite and nonnegative");
  }
  for (const auto& c : components) {
    c.validate();
    require(is_query_kind(c.kind) == (mode == Mode::kQuery), ErrorCode::kModeMismatch,
            std::string(kind_name(c.kind)) + " is not allowed in " +
                std::string(mode_name(mode)) + " mode");
    if (c.kind == Kind::kFB) {
      require(c.gamma.size() == embedder.hidden_dim(), ErrorCode::kDimensionMismatch,
              "FB gamma length must equal hidden dim");
    }
  }
}

DsnModel init_model(Mode mode, std::size_t input_dim, std::size_t hidden,
                    const std::vector<ComponentInit>& inits, SeededRng& rng,
                    std::optional<std::vector<Concave>> outer) {
  DsnModel model;
  model.mode = mode;
  model.embedder.theta = xavier_init(rng, input_dim, hidden);
  for (const auto& init : inits) {
    if (init.kind == Kind::kFB) {
      model.components.push_back(
          ComponentSpec::feature_based(std::vector<double>(hidden, init.lambda), init.psi));
    } else {
      model.components.push_back(ComponentSpec::make(init.kind, init.lambda));
    }
  }
  if (outer) {
    Composition comp{*outer, Matrix(outer->size(), inits.size())};
    for (double& w : comp.weights.data()) w = rng.uniform();
    model.composition = std::move(comp);
  } else {
    model.weights.resize(inits.size());
    for (double& w : model.weights) w = rng.uniform();
  }
  model.validate();
  return model;
}

namespace {

void check_mode(const DsnModel& model, const KernelState& state) {
  const bool has_queries = state.num_queries() > 0;
  require(has_queries == (model.mode == Mode::kQuery), ErrorCode::kModeMismatch,
          model.mode == Mode::kQuery ? "query-mode model needs a query set"
                                     : "generic model cannot take a query set");
}

double combine(const DsnModel& model, std::span<const double> values) {
  double total = 0.0;
  if (model.composition) {
    const Composition& comp = *model.composition;
    for (std::size_t p = 0; p < comp.outer.size(); ++p) {
      double u = 0.0;
      for (std::size_t j = 0; j < values.size(); ++j) u += comp.weights(p, j) * values[j];
      total += comp.outer[p].value(u);
    }
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) total += model.weights[i] * values[i];
  }
  return total;
}

// dF / df_j at the given component values.
std::vector<double> component_coefficients(const DsnModel& model,
                                           std::span<const double> values) {
  if (!model.composition) return model.weights;
  const Composition& comp = *model.composition;
  std::vector<double> coeff(values.size(), 0.0);
  for (std::size_t p = 0; p < comp.outer.size(); ++p) {
    double u = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) u += comp.weights(p, j) * values[j];
    const double slope = comp.outer[p].derivative(u);
    for (std::size_t j = 0; j < values.size(); ++j) coeff[j] += slope * comp.weights(p, j);
  }
  return coeff;
}

}  // namespace

std::vector<double> component_values(const DsnModel& model, const KernelState& state,
                                     const ItemSet& set) {
  check_mode(model, state);
  std::vector<double> values(model.components.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = evaluate(model.components[i], state, set);
  }
  return values;
}

double eval_model(const DsnModel& model, const KernelState& state, const ItemSet& set) {
  return combine(model, component_values(model, state, set));
}

ModelCache::ModelCache(const DsnModel& model, const KernelState& state)
    : model_(&model), values_(model.components.size(), 0.0), ground_size_(state.size()) {
  check_mode(model, state);
  caches_.reserve(model.components.size());
  for (const auto& c : model.components) caches_.emplace_back(c, state);
}

double ModelCache::gain(std::size_t v) const {
  std::vector<double> gains(caches_.size());
  for (std::size_t j = 0; j < caches_.size(); ++j) gains[j] = caches_[j].gain(v);
  if (!model_->composition) {
    double total = 0.0;
    for (std::size_t j = 0; j < gains.size(); ++j) total += model_->weights[j] * gains[j];
    return total;
  }
  std::vector<double> after(values_);
  for (std::size_t j = 0; j < after.size(); ++j) after[j] += gains[j];
  return combine(*model_, after) - combine(*model_, values_);
}

void ModelCache::insert(std::size_t v) {
  for (std::size_t j = 0; j < caches_.size(); ++j) {
    caches_[j].insert(v);
    values_[j] = caches_[j].value();
  }
  selected_.push_back(v);
}

ModelGradients model_subgrads(const DsnModel& model, const KernelState& state,
                              const Matrix& raw, const ItemSet& a_hat,
                              const ItemSet& target, double beta) {
  check_mode(model, state);
  const std::size_t m = model.components.size();
  ModelGradients grads;
  grads.weights.assign(model.combination_weights().size(), 0.0);
  grads.params.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    grads.params[j].assign(model.components[j].num_params(), 0.0);
  }
  KernelSensitivity sens(state);

  auto accumulate = [&](const ItemSet& set, double sign) {
    const std::vector<double> values = component_values(model, state, set);
    const std::vector<double> coeff = component_coefficients(model, values);
    if (model.composition) {
      const Composition& comp = *model.composition;
      for (std::size_t p = 0; p < comp.outer.size(); ++p) {
        double u = 0.0;
        for (std::size_t j = 0; j < m; ++j) u += comp.weights(p, j) * values[j];
        const double slope = comp.outer[p].derivative(u);
        for (std::size_t j = 0; j < m; ++j) grads.weights[p * m + j] += sign * slope * values[j];
      }
    } else {
      for (std::size_t j = 0; j < m; ++j) grads.weights[j] += sign * values[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (coeff[j] == 0.0) continue;
      const std::vector<double> dp = subgrad_params(model.components[j], state, set);
      for (std::size_t k = 0; k < dp.size(); ++k) grads.params[j][k] += sign * coeff[j] * dp[k];
      accumulate_sensitivity(model.components[j], state, set, sign * coeff[j], sens);
    }
  };
  accumulate(a_hat, 1.0);
  accumulate(target, -1.0);

  const auto w = model.combination_weights();
  for (std::size_t i = 0; i < w.size(); ++i) grads.weights[i] += beta * w[i];
  grads.theta = backprop_theta(model.embedder, raw, state, sens);
  return grads;
}

json model_to_json(const DsnModel& model) {
  json doc;
  doc["mode"] = std::string(mode_name(model.mode));
  doc["dim"] = model.embedder.input_dim();
  doc["hidden"] = model.embedder.hidden_dim();
  doc["theta"] = model.embedder.theta.data();
  json comps = json::array();
  for (const auto& c : model.components) {
    json entry;
    entry["kind"] = std::string(kind_name(c.kind));
    if (c.kind == Kind::kFB) {
      entry["gamma"] = c.gamma;
      entry["psi"] = c.psi.name();
      if (c.psi.type == Concave::Type::kMinCap) entry["cap"] = c.psi.cap;
    } else if (c.num_params() > 0) {
      entry["lambda"] = c.lambda;
    }
    comps.push_back(std::move(entry));
  }
  doc["components"] = std::move(comps);
  if (model.composition) {
    json outer = json::array();
    for (const auto& psi : model.composition->outer) {
      json unit{{"psi", psi.name()}};
      if (psi.type == Concave::Type::kMinCap) unit["cap"] = psi.cap;
      outer.push_back(std::move(unit));
    }
    json rows = json::array();
    for (std::size_t p = 0; p < model.composition->weights.rows(); ++p) {
      auto r = model.composition->weights.row(p);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    doc["composition"] = {{"outer", std::move(outer)}, {"weights", std::move(rows)}};
  } else {
    doc["weights"] = model.weights;
  }
  return doc;
}

DsnModel model_from_json(const json& doc) {
  try {
    DsnModel model;
    model.mode = parse_mode(doc.at("mode").get<std::string>());
    const auto d = doc.at("dim").get<std::size_t>();
    const auto h = doc.at("hidden").get<std::size_t>();
    model.embedder.theta = Matrix(d, h, doc.at("theta").get<std::vector<double>>());
    for (const auto& entry : doc.at("components")) {
      const Kind kind = parse_kind(entry.at("kind").get<std::string>());
      if (kind == Kind::kFB) {
        model.components.push_back(ComponentSpec::feature_based(
            entry.at("gamma").get<std::vector<double>>(),
            Concave::parse(entry.value("psi", std::string("sqrt")), entry.value("cap", 1.0))));
      } else {
        model.components.push_back(ComponentSpec::make(kind, entry.value("lambda", 0.0)));
      }
    }
    if (doc.contains("composition")) {
      const json& comp = doc.at("composition");
      Composition c;
      for (const auto& unit : comp.at("outer")) {
        c.outer.push_back(Concave::parse(unit.at("psi").get<std::string>(), unit.value("cap", 1.0)));
      }
      const auto& rows = comp.at("weights");
      c.weights = Matrix(rows.size(), model.components.size());
      for (std::size_t p = 0; p < rows.size(); ++p) {
        const auto r = rows[p].get<std::vector<double>>();
        require(r.size() == model.components.size(), ErrorCode::kShapeMismatch,
                "composition weight row length must equal component count");
        std::copy(r.begin(), r.end(), c.weights.row(p).begin());
      }
      model.composition = std::move(c);
    } else {
      model.weights = doc.at("weights").get<std::vector<double>>();
    }
    model.validate();
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedFile, std::string("malformed model: ") + e.what());
  }
}

void save_model(const DsnModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out << model_to_json(model).dump(2) << '\n';
}

DsnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedFile, path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace dsn
