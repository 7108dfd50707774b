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


// dsn: data generation, training, inference, evaluation and gradient checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dsn/component.hpp"
#include "dsn/dataset.hpp"
#include "dsn/error.hpp"
#include "dsn/learn.hpp"
#include "dsn/mixture.hpp"
#include "dsn/optimize.hpp"
#include "dsn/vrouge.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(dsn::ErrorCode code) {
  switch (code) {
    case dsn::ErrorCode::kInvalidArgument:
    case dsn::ErrorCode::kModeMismatch:
      return kExitUsage;
    case dsn::ErrorCode::kNumerical:
      return kExitNumerical;
    default:
      return kExitData;
  }
}

std::vector<dsn::Collection> load_inputs(const fs::path& path) {
  if (fs::is_directory(path)) return dsn::load_dataset(path);
  return {dsn::load_collection(path)};
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------- gen-synth

struct GenSynthArgs {
  std::string out;
  dsn::SyntheticOptions options;
};

int run_gen_synth(const GenSynthArgs& a) {
  const auto data = dsn::gen_synthetic(a.options);
  dsn::save_dataset(data, a.out);
  std::cout << "wrote " << data.size() << " collections to " << a.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  std::string dataset;
  std::string out = "run";
  std::string holdout;
  long epochs = -1;
};

int run_train(const TrainArgs& a) {
  dsn::RunConfig rc = dsn::load_run_config(a.config);
  if (!a.dataset.empty()) rc.dataset = a.dataset;
  if (a.epochs >= 0) rc.train.epochs = static_cast<std::size_t>(a.epochs);
  rc.train.validate();
  dsn::require(!rc.dataset.empty(), dsn::ErrorCode::kInvalidArgument,
               "no dataset given (config 'dataset' or --dataset)");
  fs::path dataset_path = rc.dataset;
  if (a.dataset.empty() && dataset_path.is_relative()) {
    dataset_path = fs::path(a.config).parent_path() / dataset_path;
  }
  const auto data = load_inputs(dataset_path);

  std::vector<dsn::InstancePtr> train, val;
  bool held = false;
  for (const auto& c : data) {
    auto inst = dsn::make_instances(c, rc.model.mode, rc.train.budget);
    if (!a.holdout.empty() && c.name == a.holdout) {
      val.insert(val.end(), inst.begin(), inst.end());
      held = true;
    } else {
      train.insert(train.end(), inst.begin(), inst.end());
    }
  }
  dsn::require(a.holdout.empty() || held, dsn::ErrorCode::kInvalidArgument,
               "no collection named '" + a.holdout + "'");
  dsn::require(!train.empty(), dsn::ErrorCode::kInvalidArgument, "no training collections");
  if (val.empty()) val = train;

  const dsn::DsnModel init = dsn::init_model(rc.model, data.front().dim, rc.train.seed);
  const dsn::TrainReport report = dsn::fit(dsn::make_examples(train), val, init, rc.train);

  fs::create_directories(a.out);
  dsn::save_model(report.final_model, fs::path(a.out) / "model.json");
  dsn::save_model(report.best_model, fs::path(a.out) / "best_model.json");
  dsn::write_report_csv(report, fs::path(a.out) / "metrics.csv");
  std::cout << "epochs " << report.rows.size() << (report.converged ? " (converged)" : "")
            << "; train " << (report.rows.empty() ? report.initial_train_vrouge
                                                  : report.rows.back().train_vrouge)
            << "; best epoch " << report.best_epoch << " val " << report.best_val_vrouge
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- summarize

struct SummarizeArgs {
  std::string model;
  std::string collection;
  std::size_t budget = 10;
  std::string query;
  std::string report;
};

int run_summarize(const SummarizeArgs& a) {
  const dsn::DsnModel model = dsn::load_model(a.model);
  const dsn::Collection c = dsn::load_collection(a.collection);
  const bool query_mode = model.mode == dsn::Mode::kQuery;
  dsn::require(query_mode == !a.query.empty(), dsn::ErrorCode::kModeMismatch,
               query_mode ? "query model needs --query" : "--query given for a generic model");
  dsn::require(a.budget >= 1 && a.budget <= c.size(), dsn::ErrorCode::kInvalidArgument,
               "budget must lie in [1, n]");
  dsn::require(c.dim == model.embedder.input_dim(), dsn::ErrorCode::kDimensionMismatch,
               "collection dim does not match the model");

  dsn::Matrix queries;
  std::vector<dsn::ItemSet> references = c.reference_summaries;
  if (query_mode) {
    const dsn::QuerySet* qs = nullptr;
    for (const auto& q : c.queries) {
      if (q.label == a.query) qs = &q;
    }
    dsn::require(qs != nullptr, dsn::ErrorCode::kInvalidArgument,
                 "no query labelled '" + a.query + "'");
    queries = qs->features;
    references = qs->summaries;
  }
  const dsn::KernelState state = dsn::make_kernel_state(model.embedder, c.feature_matrix(), queries);
  const dsn::GreedyTrace trace = dsn::summarize(model, state, a.budget);

  for (std::size_t i = 0; i < trace.selected.size(); ++i) {
    std::cout << (i ? " " : "") << c.items[trace.selected[i]].id;
  }
  std::cout << "\n";

  json report = {{"collection", c.name},
                 {"budget", a.budget},
                 {"selected", trace.selected},
                 {"gains", trace.gains},
                 {"objective", trace.total()}};
  if (query_mode) report["query"] = a.query;
  if (!references.empty()) {
    const dsn::VRougeScorer scorer(references, c.histograms());
    dsn::SeededRng rng(dsn::kDefaultNormSeed);
    const dsn::NormConstants norm = dsn::norm_constants_from_sets(
        scorer, dsn::sample_subsets(c.size(), a.budget, dsn::kDefaultNormSamples, rng));
    const double raw = scorer.raw(trace.selected);
    report["vrouge_raw"] = raw;
    report["vrouge_random"] = norm.r_random;
    report["vrouge_human"] = norm.r_human;
    if (!norm.degenerate()) report["vrouge_normalized"] = dsn::normalized_vrouge(raw, norm);
  }
  if (a.report.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream out(a.report);
    dsn::require(static_cast<bool>(out), dsn::ErrorCode::kIo, "cannot write " + a.report);
    out << report.dump(2) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string model;
  std::string dataset;
  std::size_t budget = 10;
  std::string out;
};

int run_evaluate(const EvaluateArgs& a) {
  const dsn::DsnModel model = dsn::load_model(a.model);
  const auto data = load_inputs(a.dataset);
  std::ostringstream csv;
  csv << "instance,vrouge\n";
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& c : data) {
    for (const auto& inst : dsn::make_instances(c, model.mode, a.budget)) {
      const double score = dsn::score_instance(model, *inst);
      csv << inst->name << ',' << fmt17(score) << '\n';
      sum += score;
      ++count;
    }
  }
  csv << "mean," << fmt17(sum / static_cast<double>(count)) << '\n';
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(a.out);
    dsn::require(static_cast<bool>(out), dsn::ErrorCode::kIo, "cannot write " + a.out);
    out << csv.str();
  }
  return kExitOk;
}

// ---------------------------------------------------------------- loocv

struct LoocvArgs {
  std::string config;
  std::string dataset;
  std::string out;
  long epochs = -1;
};

int run_loocv_cmd(const LoocvArgs& a) {
  dsn::RunConfig rc = dsn::load_run_config(a.config);
  if (!a.dataset.empty()) rc.dataset = a.dataset;
  if (a.epochs >= 0) rc.train.epochs = static_cast<std::size_t>(a.epochs);
  rc.train.validate();
  fs::path dataset_path = rc.dataset;
  if (a.dataset.empty() && dataset_path.is_relative()) {
    dataset_path = fs::path(a.config).parent_path() / dataset_path;
  }
  const auto data = dsn::load_dataset(dataset_path);
  const dsn::LoocvResult r = dsn::run_loocv(data, rc.model, rc.train);
  std::ostringstream csv;
  csv << "fold,test,best_epoch,val_vrouge,test_vrouge\n";
  for (std::size_t i = 0; i < r.folds.size(); ++i) {
    const auto& f = r.folds[i];
    csv << i << ',' << f.test_name << ',' << f.best_epoch << ',' << fmt17(f.val_vrouge) << ','
        << fmt17(f.test_vrouge) << '\n';
  }
  csv << "mean,,,," << fmt17(r.mean_test_vrouge) << '\n';
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(a.out);
    dsn::require(static_cast<bool>(out), dsn::ErrorCode::kIo, "cannot write " + a.out);
    out << csv.str();
  }
  return kExitOk;
}

// ---------------------------------------------------------------- check-gradients

constexpr double kFdStep = 1e-5;
constexpr double kGradLimit = 1e-3;

std::vector<double> central(std::vector<double>& x, const std::function<double()>& fn,
                            double step) {
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

double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    ref += b[i] * b[i];
  }
  diff = std::sqrt(diff);
  ref = std::sqrt(ref);
  return ref < 1e-8 ? diff : diff / ref;
}

dsn::ComponentSpec random_component(dsn::SeededRng& rng, dsn::Kind kind, std::size_t h) {
  using dsn::Kind;
  switch (kind) {
    case Kind::kFLP:
      return dsn::ComponentSpec::make(kind, rng.uniform(0.05, 1.0));
    case Kind::kSC:
    case Kind::kGC:
      return dsn::ComponentSpec::make(kind, rng.uniform(0.05, 0.95));
    case Kind::kFL1MI:
    case Kind::kFL2MI:
      return dsn::ComponentSpec::make(kind, rng.uniform(0.05, 2.0));
    case Kind::kFB: {
      std::vector<double> gamma(h);
      for (double& g : gamma) g = rng.uniform(0.0, 1.0);
      return dsn::ComponentSpec::feature_based(std::move(gamma),
                                               rng.below(2) ? dsn::Concave::parse("sqrt")
                                                            : dsn::Concave::parse("log1p"));
    }
    default:
      return dsn::ComponentSpec::make(kind);
  }
}

struct GradRow {
  std::size_t points = 0;
  std::size_t skipped = 0;
  double theta = 0.0;
  double params = 0.0;
};

// Random small problems. A point whose difference quotient changes between
// two step sizes sits on a kink (tied max/min) and is skipped.
GradRow check_kind(dsn::Kind kind, dsn::SeededRng& rng, std::size_t points) {
  constexpr std::size_t d = 3, h = 4;
  GradRow row;
  std::size_t attempts = 0;
  while (row.points < points && attempts++ < 20 * points) {
    const std::size_t n = 4 + rng.below(4);
    dsn::EmbedderParams params;
    params.theta = dsn::Matrix(d, h);
    for (double& x : params.theta.data()) x = rng.normal();
    dsn::Matrix raw(n, d);
    for (double& x : raw.data()) x = rng.normal();
    dsn::Matrix queries(dsn::is_query_kind(kind) ? 2 : 0, h);
    for (double& x : queries.data()) x = rng.uniform(0.05, 1.0);
    const dsn::ComponentSpec spec = random_component(rng, kind, h);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    const std::size_t size = 1 + rng.below(n - 1);
    for (std::size_t i = 0; i < size; ++i) std::swap(perm[i], perm[i + rng.below(n - i)]);
    dsn::ItemSet set(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(set.begin(), set.end());

    dsn::KernelState state = dsn::make_kernel_state(params, raw, queries);
    const dsn::Matrix analytic = dsn::subgrad_theta(spec, state, set, params, raw);
    auto value = [&] {
      return dsn::evaluate(spec, dsn::make_kernel_state(params, raw, queries), set);
    };
    const auto fd = central(params.theta.data(), value, kFdStep);
    const auto fd_half = central(params.theta.data(), value, kFdStep / 2);
    if (rel_error(fd_half, fd) > 1e-5) {
      ++row.skipped;
      continue;
    }
    double param_err = 0.0;
    if (spec.num_params() > 0) {
      const auto grad = dsn::subgrad_params(spec, state, set);
      std::vector<double> values = spec.params();
      auto moved_value = [&] {
        dsn::ComponentSpec moved = spec;
        moved.set_params(values);
        return dsn::evaluate(moved, state, set);
      };
      const auto pfd = central(values, moved_value, kFdStep);
      const auto pfd_half = central(values, moved_value, kFdStep / 2);
      if (rel_error(pfd_half, pfd) > 1e-5) {
        ++row.skipped;
        continue;
      }
      param_err = rel_error(grad, pfd);
    }
    ++row.points;
    row.theta = std::max(row.theta, rel_error(analytic.data(), fd));
    row.params = std::max(row.params, param_err);
  }
  return row;
}

struct CheckArgs {
  std::uint64_t seed = 7;
  std::size_t points = 20;
  std::string out;
};

int run_check_gradients(const CheckArgs& a) {
  dsn::SeededRng rng(a.seed);
  std::ostringstream csv;
  csv << "kind,points,skipped,max_rel_err_theta,max_rel_err_params,pass\n";
  bool ok = true;
  for (dsn::Kind kind : {dsn::Kind::kFL, dsn::Kind::kFLP, dsn::Kind::kSC, dsn::Kind::kGC,
                         dsn::Kind::kFB, dsn::Kind::kGCMI, dsn::Kind::kFL1MI,
                         dsn::Kind::kFL2MI}) {
    const GradRow r = check_kind(kind, rng, a.points);
    const bool pass = r.points == a.points && r.theta <= kGradLimit && r.params <= kGradLimit;
    ok = ok && pass;
    char buf[64];
    csv << dsn::kind_name(kind) << ',' << r.points << ',' << r.skipped << ',';
    std::snprintf(buf, sizeof buf, "%.3e,%.3e", r.theta, r.params);
    csv << buf << ',' << (pass ? "yes" : "no") << '\n';
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(a.out);
    dsn::require(static_cast<bool>(out), dsn::ErrorCode::kIo, "cannot write " + a.out);
    out << csv.str();
  }
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dsn: learned submodular models for extractive summarization"};
  app.require_subcommand(1);

  GenSynthArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synth", "generate a planted synthetic dataset");
  gen_cmd->add_option("--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--collections", gen.options.collections);
  gen_cmd->add_option("--items", gen.options.items);
  gen_cmd->add_option("--dim", gen.options.dim);
  gen_cmd->add_option("--clusters", gen.options.clusters);
  gen_cmd->add_option("--words", gen.options.words);
  gen_cmd->add_option("--budget", gen.options.budget);
  gen_cmd->add_option("--seed", gen.options.seed);
  gen_cmd->add_option("--noise-words", gen.options.noise_words, "extra random words per item");
  gen_cmd->add_option("--spread", gen.options.spread, "within-cluster std");
  gen_cmd->add_option("--nuisance", gen.options.nuisance, "std of non-signal coordinates");
  gen_cmd->add_flag("--query", gen.options.with_query, "add one query per collection");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "fit a model; writes model.json and metrics.csv");
  train_cmd->add_option("--config", train.config, "run config JSON")->required();
  train_cmd->add_option("--dataset", train.dataset, "dataset directory or collection file");
  train_cmd->add_option("--epochs", train.epochs, "override epochs");
  train_cmd->add_option("--out", train.out, "output directory");
  train_cmd->add_option("--holdout", train.holdout,
                        "collection used for validation (default: the training set)");

  SummarizeArgs sum;
  auto* sum_cmd = app.add_subcommand("summarize", "greedy summary of one collection");
  sum_cmd->add_option("--model", sum.model)->required();
  sum_cmd->add_option("--collection", sum.collection)->required();
  sum_cmd->add_option("--budget", sum.budget)->required();
  sum_cmd->add_option("--query", sum.query, "query label (query models only)");
  sum_cmd->add_option("--report", sum.report, "write the JSON report here instead of stdout");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "per-collection scores of a fixed model");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--dataset", eval.dataset)->required();
  eval_cmd->add_option("--budget", eval.budget);
  eval_cmd->add_option("--out", eval.out, "CSV path (default stdout)");

  LoocvArgs loocv;
  auto* loocv_cmd = app.add_subcommand("loocv", "leave-one-collection-out evaluation");
  loocv_cmd->add_option("--config", loocv.config)->required();
  loocv_cmd->add_option("--dataset", loocv.dataset);
  loocv_cmd->add_option("--epochs", loocv.epochs);
  loocv_cmd->add_option("--out", loocv.out, "CSV path (default stdout)");

  CheckArgs check;
  auto* check_cmd =
      app.add_subcommand("check-gradients", "analytic vs finite-difference gradients");
  check_cmd->add_option("--seed", check.seed);
  check_cmd->add_option("--points", check.points, "points per kind");
  check_cmd->add_option("--out", check.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen_synth(gen);
    if (*train_cmd) return run_train(train);
    if (*sum_cmd) return run_summarize(sum);
    if (*eval_cmd) return run_evaluate(eval);
    if (*loocv_cmd) return run_loocv_cmd(loocv);
    if (*check_cmd) return run_check_gradients(check);
  } catch (const dsn::Error& e) {
    std::cerr << "error (" << dsn::error_code_name(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
