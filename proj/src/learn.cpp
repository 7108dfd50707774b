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

#include "dsn/learn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "dsn/error.hpp"
#include "dsn/parallel.hpp"

namespace dsn {

using nlohmann::json;

KernelState Instance::kernel_state(const DsnModel& model) const {
  return make_kernel_state(model.embedder, raw, queries);
}

std::vector<InstancePtr> make_instances(const Collection& c, Mode mode, std::size_t budget) {
  require(budget >= 1 && budget <= c.size(), ErrorCode::kInvalidArgument,
          c.name + ": budget must lie in [1, n]");
  std::vector<InstancePtr> out;
  if (mode == Mode::kGeneric) {
    require(!c.reference_summaries.empty(), ErrorCode::kInvalidArgument,
            c.name + ": no reference summaries");
    VRougeScorer scorer(c.reference_summaries, c.histograms());
    NormConstants norm;
    if (c.vrouge_norm && c.vrouge_norm->budget == budget && !c.vrouge_norm->degenerate()) {
      norm = *c.vrouge_norm;
    } else {
      norm = norm_constants(scorer, budget, kDefaultNormSamples, kDefaultNormSeed);
    }
    out.push_back(std::make_shared<Instance>(
        Instance{c.name, c.feature_matrix(), Matrix(0, 0), std::move(scorer), norm, budget}));
    return out;
  }
  for (const auto& q : c.queries) {
    if (q.summaries.empty()) continue;
    VRougeScorer scorer(q.summaries, c.histograms());
    NormConstants norm = norm_constants(scorer, budget, kDefaultNormSamples, kDefaultNormSeed);
    out.push_back(std::make_shared<Instance>(Instance{c.name + "/" + q.label,
                                                      c.feature_matrix(), q.features,
                                                      std::move(scorer), norm, budget}));
  }
  require(!out.empty(), ErrorCode::kInvalidArgument,
          c.name + ": query mode needs at least one query with reference summaries");
  return out;
}

std::vector<TrainExample> make_examples(const std::vector<InstancePtr>& instances) {
  std::vector<TrainExample> out;
  for (const auto& inst : instances) {
    for (const auto& ref : inst->scorer.references()) out.push_back({inst, ref});
  }
  return out;
}

void TrainConfig::validate() const {
  require(beta >= 0.0, ErrorCode::kInvalidArgument, "beta must be >= 0");
  require(lr_w >= 0.0 && lr_theta >= 0.0 && lr_lambda >= 0.0, ErrorCode::kInvalidArgument,
          "learning rates must be >= 0");
  require(decay >= 0.0, ErrorCode::kInvalidArgument, "decay must be >= 0");
  require(tol > 0.0, ErrorCode::kInvalidArgument, "tol must be > 0");
  require(budget >= 1, ErrorCode::kInvalidArgument, "budget must be >= 1");
}

ModelSpec ModelSpec::default_generic() {
  ModelSpec spec;
  spec.mode = Mode::kGeneric;
  spec.hidden = 512;
  spec.components = {{Kind::kFL, 0.0, {}}, {Kind::kSC, 0.02, {}}, {Kind::kFB, 0.001, {}}};
  return spec;
}

ModelSpec ModelSpec::default_query() {
  ModelSpec spec;
  spec.mode = Mode::kQuery;
  spec.hidden = 959;
  spec.components = {{Kind::kGCMI, 0.0, {}}, {Kind::kFL2MI, 1.0, {}}};
  return spec;
}

RunConfig run_config_from_json(const json& doc) {
  RunConfig rc;
  try {
    const Mode mode = parse_mode(doc.value("mode", std::string("generic")));
    rc.model = mode == Mode::kQuery ? ModelSpec::default_query() : ModelSpec::default_generic();
    rc.model.hidden = doc.value("hidden", rc.model.hidden);
    if (doc.contains("components")) {
      rc.model.components.clear();
      for (const auto& c : doc.at("components")) {
        ComponentInit init;
        init.kind = parse_kind(c.at("kind").get<std::string>());
        init.lambda = c.value("init_lambda", init.kind == Kind::kFB ? 0.001 : 0.0);
        init.psi = Concave::parse(c.value("psi", std::string("sqrt")), c.value("cap", 1.0));
        rc.model.components.push_back(init);
      }
    }
    if (doc.contains("composition")) {
      std::vector<Concave> outer;
      for (const auto& u : doc.at("composition").at("outer")) {
        if (u.is_string()) {
          outer.push_back(Concave::parse(u.get<std::string>()));
        } else {
          outer.push_back(Concave::parse(u.at("psi").get<std::string>(), u.value("cap", 1.0)));
        }
      }
      rc.model.outer = std::move(outer);
    }
    TrainConfig& t = rc.train;
    t.mode = mode;
    t.beta = doc.value("beta", t.beta);
    t.epochs = doc.value("epochs", t.epochs);
    t.lr_w = doc.value("lr_w", t.lr_w);
    t.lr_theta = doc.value("lr_theta", t.lr_theta);
    t.lr_lambda = doc.value("lr_lambda", t.lr_lambda);
    t.decay = doc.value("decay", t.decay);
    t.tol = doc.value("tol", t.tol);
    t.seed = doc.value("seed", t.seed);
    t.budget = doc.value("budget", t.budget);
    rc.dataset = doc.value("dataset", std::string());
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad run config: ") + e.what());
  }
  rc.train.validate();
  require(rc.model.hidden >= 1, ErrorCode::kInvalidArgument, "hidden must be >= 1");
  require(!rc.model.components.empty(), ErrorCode::kInvalidArgument,
          "run config needs at least one component");
  for (const auto& c : rc.model.components) {
    require(is_query_kind(c.kind) == (rc.model.mode == Mode::kQuery), ErrorCode::kModeMismatch,
            std::string(kind_name(c.kind)) + " does not match mode " +
                std::string(mode_name(rc.model.mode)));
  }
  return rc;
}

json run_config_to_json(const RunConfig& rc) {
  json comps = json::array();
  for (const auto& c : rc.model.components) {
    json e{{"kind", std::string(kind_name(c.kind))}, {"init_lambda", c.lambda}};
    if (c.kind == Kind::kFB) e["psi"] = c.psi.name();
    comps.push_back(std::move(e));
  }
  const TrainConfig& t = rc.train;
  json doc{{"mode", std::string(mode_name(rc.model.mode))},
           {"hidden", rc.model.hidden},
           {"components", comps},
           {"beta", t.beta},
           {"epochs", t.epochs},
           {"lr_w", t.lr_w},
           {"lr_theta", t.lr_theta},
           {"lr_lambda", t.lr_lambda},
           {"decay", t.decay},
           {"tol", t.tol},
           {"seed", t.seed},
           {"budget", t.budget},
           {"dataset", rc.dataset}};
  if (rc.model.outer) {
    json outer = json::array();
    for (const auto& psi : *rc.model.outer) outer.push_back({{"psi", psi.name()}, {"cap", psi.cap}});
    doc["composition"] = {{"outer", outer}};
  }
  return doc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
  return run_config_from_json(doc);
}

DsnModel init_model(const ModelSpec& spec, std::size_t input_dim, std::uint64_t seed) {
  SeededRng rng(seed);
  return init_model(spec.mode, input_dim, spec.hidden, spec.components, rng, spec.outer);
}

namespace {

double half_weight_norm(const DsnModel& model, double beta) {
  double sq = 0.0;
  for (double w : model.combination_weights()) sq += w * w;
  return 0.5 * beta * sq;
}

std::vector<double> flat_params(const DsnModel& model) {
  std::vector<double> out;
  for (const auto& c : model.components) {
    const auto p = c.params();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

void set_flat_params(DsnModel& model, const std::vector<double>& values) {
  std::size_t offset = 0;
  for (auto& c : model.components) {
    const std::size_t k = c.num_params();
    c.set_params(std::span<const double>(values.data() + offset, k));
    offset += k;
  }
}

void add_flat(std::vector<double>& acc, const std::vector<std::vector<double>>& per_component) {
  std::size_t offset = 0;
  for (const auto& p : per_component) {
    for (double g : p) acc[offset++] += g;
  }
}

void check_finite(double value, const std::string& what) {
  require(std::isfinite(value), ErrorCode::kNumerical, what + " is not finite");
}

}  // namespace

HingeResult hinge_objective(const DsnModel& model, const TrainExample& ex,
                            const KernelState& state, double beta) {
  const Instance& inst = *ex.instance;
  HingeResult r;
  r.a_hat = loss_augmented_inference(model, state, inst.scorer, inst.budget);
  const double augmented = eval_model(model, state, r.a_hat.selected) + inst.scorer.loss(r.a_hat.selected);
  r.value = augmented - eval_model(model, state, ex.target) + half_weight_norm(model, beta);
  return r;
}

HingeResult hinge_objective(const DsnModel& model, const TrainExample& ex, double beta) {
  return hinge_objective(model, ex, ex.instance->kernel_state(model), beta);
}

ModelGradients compute_subgradients(const DsnModel& model, const TrainExample& ex,
                                    double beta) {
  const KernelState state = ex.instance->kernel_state(model);
  const GreedyTrace a_hat =
      loss_augmented_inference(model, state, ex.instance->scorer, ex.instance->budget);
  return model_subgrads(model, state, ex.instance->raw, a_hat.selected, ex.target, beta);
}

double score_instance(const DsnModel& model, const Instance& inst) {
  const KernelState state = inst.kernel_state(model);
  const GreedyTrace trace = summarize(model, state, inst.budget);
  return normalized_vrouge(trace.selected, inst.norm, inst.scorer);
}

double mean_score(const DsnModel& model, const std::vector<InstancePtr>& instances) {
  if (instances.empty()) return 0.0;
  std::vector<double> scores(instances.size());
  parallel_for(instances.size(),
               [&](std::size_t i) { scores[i] = score_instance(model, *instances[i]); });
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

TrainReport fit(const std::vector<TrainExample>& train,
                const std::vector<InstancePtr>& validation, DsnModel model,
                const TrainConfig& config) {
  config.validate();
  require(!train.empty(), ErrorCode::kInvalidArgument, "fit: empty training set");
  model.validate();
  for (const auto& ex : train) {
    require(ex.instance->raw.cols() == model.embedder.input_dim(), ErrorCode::kDimensionMismatch,
            ex.instance->name + ": feature dim does not match the embedder");
  }

  std::vector<InstancePtr> train_instances;
  for (const auto& ex : train) {
    if (train_instances.empty() || train_instances.back() != ex.instance) {
      train_instances.push_back(ex.instance);
    }
  }

  TrainReport report;
  report.config = config;
  report.initial_train_vrouge = mean_score(model, train_instances);
  report.initial_val_vrouge = mean_score(model, validation);
  report.best_model = model;
  report.best_val_vrouge = report.initial_val_vrouge;

  AdamState adam_w(model.combination_weights().size(), config.lr_w, config.decay);
  AdamState adam_lambda(flat_params(model).size(), config.lr_lambda, config.decay);
  AdamState adam_theta(model.embedder.theta.size(), config.lr_theta, config.decay);

  const std::size_t n = train.size();
  std::vector<KernelState> states(n);
  double previous_objective = 0.0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const std::size_t schedule_epoch = epoch - 1;
    parallel_for(n, [&](std::size_t i) { states[i] = train[i].instance->kernel_state(model); });

    // Phase 1: mixture weights, everything else fixed.
    std::vector<double> hinge(n);
    std::vector<std::vector<double>> weight_grads(n);
    parallel_for(n, [&](std::size_t i) {
      const HingeResult r = hinge_objective(model, train[i], states[i], config.beta);
      hinge[i] = r.value;
      const auto va = component_values(model, states[i], r.a_hat.selected);
      const auto vy = component_values(model, states[i], train[i].target);
      if (model.composition) {
        weight_grads[i] = model_subgrads(model, states[i], train[i].instance->raw,
                                         r.a_hat.selected, train[i].target, config.beta)
                              .weights;
      } else {
        weight_grads[i].resize(va.size());
        for (std::size_t j = 0; j < va.size(); ++j) {
          weight_grads[i][j] = va[j] - vy[j] + config.beta * model.weights[j];
        }
      }
    });
    double objective = 0.0;
    std::vector<double> grad_w(model.combination_weights().size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      objective += hinge[i];
      for (std::size_t j = 0; j < grad_w.size(); ++j) grad_w[j] += weight_grads[i][j];
    }
    check_finite(objective, "training objective at epoch " + std::to_string(epoch));
    if (config.lr_w > 0.0) {
      adam_step(adam_w, model.combination_weights(), grad_w, schedule_epoch);
      model.project();
    }

    // Phase 2: internal parameters and theta, weights fixed.
    if (config.lr_lambda > 0.0 || config.lr_theta > 0.0) {
      std::vector<ModelGradients> grads(n);
      parallel_for(n, [&](std::size_t i) {
        const Instance& inst = *train[i].instance;
        const GreedyTrace a_hat = loss_augmented_inference(model, states[i], inst.scorer, inst.budget);
        grads[i] = model_subgrads(model, states[i], inst.raw, a_hat.selected, train[i].target,
                                  config.beta);
      });
      std::vector<double> grad_lambda(adam_lambda.first_moment.size(), 0.0);
      Matrix grad_theta(model.embedder.theta.rows(), model.embedder.theta.cols());
      for (std::size_t i = 0; i < n; ++i) {
        add_flat(grad_lambda, grads[i].params);
        grad_theta += grads[i].theta;
      }
      require(grad_theta.all_finite(), ErrorCode::kNumerical,
              "theta gradient is not finite at epoch " + std::to_string(epoch));
      if (config.lr_lambda > 0.0 && !grad_lambda.empty()) {
        std::vector<double> params = flat_params(model);
        adam_step(adam_lambda, params, grad_lambda, schedule_epoch);
        set_flat_params(model, params);
      }
      if (config.lr_theta > 0.0) {
        adam_step(adam_theta, model.embedder.theta, grad_theta, schedule_epoch);
      }
    }
    require(model.embedder.theta.all_finite(), ErrorCode::kNumerical,
            "theta diverged at epoch " + std::to_string(epoch));

    EpochRow row;
    row.epoch = epoch;
    row.objective = objective;
    row.train_vrouge = mean_score(model, train_instances);
    row.val_vrouge = validation.empty() ? 0.0 : mean_score(model, validation);
    report.rows.push_back(row);
    if (!validation.empty() && row.val_vrouge > report.best_val_vrouge) {
      report.best_val_vrouge = row.val_vrouge;
      report.best_model = model;
      report.best_epoch = epoch;
    }

    if (epoch > 1) {
      const double rel = std::abs(objective - previous_objective) /
                         std::max(std::abs(previous_objective), 1e-12);
      if (rel < config.tol) {
        report.converged = true;
        break;
      }
    }
    previous_objective = objective;
  }
  report.final_model = std::move(model);
  if (validation.empty()) {
    report.best_model = report.final_model;
    report.best_epoch = report.rows.size();
  }
  return report;
}

void write_report_csv(const TrainReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out << "epoch,objective,train_vrouge,val_vrouge\n";
  out.precision(17);
  for (const auto& r : report.rows) {
    out << r.epoch << ',' << r.objective << ',' << r.train_vrouge << ',' << r.val_vrouge << '\n';
  }
}

LoocvResult run_loocv(const std::vector<Collection>& collections, const ModelSpec& spec,
                      const TrainConfig& config) {
  require(!collections.empty(), ErrorCode::kInvalidArgument, "empty dataset");
  std::vector<std::vector<InstancePtr>> instances;
  for (const auto& c : collections) instances.push_back(make_instances(c, spec.mode, config.budget));

  LoocvResult result;
  for (const Split& split : loocv_splits(collections.size())) {
    std::vector<InstancePtr> train_instances;
    for (std::size_t i : split.train) {
      train_instances.insert(train_instances.end(), instances[i].begin(), instances[i].end());
    }
    const DsnModel init = init_model(spec, collections[split.test].dim, config.seed);
    const TrainReport report =
        fit(make_examples(train_instances), instances[split.validation], init, config);
    FoldResult fold;
    fold.test_name = collections[split.test].name;
    fold.best_epoch = report.best_epoch;
    fold.val_vrouge = report.best_val_vrouge;
    fold.test_vrouge = mean_score(report.best_model, instances[split.test]);
    result.folds.push_back(fold);
  }
  double sum = 0.0;
  for (const auto& f : result.folds) sum += f.test_vrouge;
  result.mean_test_vrouge = sum / static_cast<double>(result.folds.size());
  return result;
}

}  // namespace dsn
