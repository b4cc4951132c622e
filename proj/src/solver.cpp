// Copyright 2026 The pairfair Authors
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

#include "pairfair/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "pairfair/errors.hpp"
#include "pairfair/rng.hpp"
#include "pairfair/shrink.hpp"
#include "pairfair/swap_regret.hpp"

namespace pairfair {

void SolverConfig::validate() const {
  if (iterations < 1) throw ConfigError("solver.iterations must be >= 1");
  if (snapshots < 1 || snapshots > iterations) {
    throw ConfigError("solver.snapshots must lie in [1, iterations]");
  }
  if (step_grid.empty()) throw ConfigError("solver.step_grid is empty");
  for (double s : step_grid) {
    if (!(s > 0.0)) throw ConfigError("solver.step_grid values must be positive");
  }
  if (!(lambda_step_ratio > 0.0)) throw ConfigError("solver.lambda_step_ratio must be positive");
  if (minibatch && *minibatch < 1) throw ConfigError("solver.minibatch must be >= 1");
  if (!(initial_objective_weight > 0.0 && initial_objective_weight < 1.0)) {
    throw ConfigError("solver.initial_objective_weight must lie in (0, 1)");
  }
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kUnconstrained:
      return "unconstrained";
    case Method::kDebiased:
      return "debiased";
    case Method::kConstrained:
      return "constrained";
    case Method::kRobust:
      return "robust";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  for (Method m : {Method::kUnconstrained, Method::kDebiased, Method::kConstrained,
                   Method::kRobust}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError(fmt::format("unknown method '{}'", s));
}

Adam::Adam(std::size_t n, double step, AdamConfig cfg)
    : step_(step), cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

void Adam::ascend(std::vector<double>& params, const std::vector<double>& gradient) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * gradient[k];
    v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * gradient[k] * gradient[k];
    params[k] += step_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + cfg_.epsilon);
  }
}

std::size_t select_step_size(std::span<const RunScore> runs, double epsilon,
                             double tolerance) {
  if (runs.empty()) throw ConfigError("no runs to select from");
  std::optional<std::size_t> best_feasible;
  std::size_t least_violating = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const RunScore& s = runs[r];
    const bool feasible = !s.violation || *s.violation <= epsilon + tolerance;
    if (feasible && (!best_feasible || s.objective > runs[*best_feasible].objective)) {
      best_feasible = r;
    }
    const double v = s.violation.value_or(0.0);
    if (v < runs[least_violating].violation.value_or(0.0)) least_violating = r;
  }
  return best_feasible.value_or(least_violating);
}

Dataset train_subset(const Dataset& dataset) {
  std::vector<Example> ex;
  for (int i : dataset.indices(SplitTag::kTrain)) ex.push_back(dataset[i]);
  return Dataset(dataset.task(), dataset.protection(), dataset.dim(), std::move(ex));
}

EvalOptions evaluation_options(const SolverConfig& cfg) {
  EvalOptions opts;
  opts.max_pairs = cfg.max_pairs;
  opts.pair_seed = derive_seed(cfg.seed, 1000);
  return opts;
}

namespace {

enum class ObjectiveKind { kAuc, kMse };

// Everything a run needs, built once and shared read-only by the grid.
struct Problem {
  const Dataset* full = nullptr;
  Dataset train;
  PairSet pairs;
  std::optional<PairSet> parity;
  Evaluator validation;
  ObjectiveKind objective = ObjectiveKind::kAuc;
  Rate objective_rate;
};

Problem make_problem(const Dataset& dataset, const SolverConfig& cfg) {
  if (!dataset.has_split()) throw DataError("dataset must be split before training");
  Dataset train = train_subset(dataset);
  PairSet pairs = enumerate_pairs(train, std::nullopt, cfg.max_pairs, cfg.seed);
  std::optional<PairSet> parity;
  if (train.protection().is_discrete()) parity = enumerate_parity_pairs(train, std::nullopt);
  Evaluator val(dataset, SplitTag::kValidation, evaluation_options(cfg));
  const ObjectiveKind kind =
      dataset.task() == Task::kRanking ? ObjectiveKind::kAuc : ObjectiveKind::kMse;
  if (kind == ObjectiveKind::kAuc && pairs.empty()) {
    throw DataError("no training pairs");
  }
  if (train.empty()) throw DataError("empty training split");
  Rate obj = rate_all(pairs);
  return Problem{&dataset, std::move(train), std::move(pairs), std::move(parity),
                 std::move(val), kind, std::move(obj)};
}

struct MseValue {
  double value = 0.0;
  std::vector<double> gradient;
};

MseValue mse_with_gradient(const Model& model, const Dataset& data,
                           std::span<const int> rows) {
  MseValue out;
  out.gradient.assign(model.theta().size(), 0.0);
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (int i : rows) {
    const double r = model.score(data[i].features) - data[i].label;
    out.value += r * r * inv;
    model.accumulate_gradient(data[i].features, 2.0 * r * inv, out.gradient);
  }
  return out;
}

std::vector<int> all_rows(const Dataset& d) {
  std::vector<int> r(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) r[i] = static_cast<int>(i);
  return r;
}

// Uniform with-replacement sample of `b` pairs; weights and normalizer are
// rescaled so the sampled rate is an unbiased estimate.
Rate sample_rate(const Rate& rate, int b, Rng& rng) {
  Rate s;
  s.name = rate.name;
  s.key = rate.key;
  const std::size_t n = rate.pairs.size();
  if (n == 0) return s;
  s.pairs.reserve(b);
  if (!rate.weights.empty()) s.weights.reserve(b);
  for (int k = 0; k < b; ++k) {
    const std::size_t p = rng.below(n);
    s.pairs.push_back(rate.pairs[p]);
    if (!rate.weights.empty()) s.weights.push_back(rate.weights[p]);
  }
  s.normalizer = rate.denominator() * static_cast<double>(b) / static_cast<double>(n);
  return s;
}

std::vector<int> sample_rows(std::size_t n, int b, Rng& rng) {
  std::vector<int> rows(b);
  for (int k = 0; k < b; ++k) rows[k] = static_cast<int>(rng.below(n));
  return rows;
}

double validation_objective(const Evaluation& e) {
  if (e.mse) return -*e.mse;
  return e.auc.value_or(0.0);
}

Snapshot make_snapshot(const Problem& pb, int iteration, const Model& model,
                       double surrogate) {
  Snapshot s{iteration, model, {}, {}, surrogate, pb.validation.evaluate(model), 0.0, {}};
  s.validation_objective = validation_objective(s.validation);
  return s;
}

template <typename Fn>
std::vector<RunResult> run_grid(const SolverConfig& cfg, Fn&& run_one) {
  const std::size_t n = cfg.step_grid.size();
  std::vector<RunResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  unsigned hw = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, n);
  auto work = [&](std::size_t w) {
    for (std::size_t r = w; r < n; r += workers) {
      try {
        results[r] = run_one(r, cfg.step_grid[r]);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

int snapshot_iteration(int k, const SolverConfig& cfg) {
  return static_cast<int>((static_cast<long long>(k) * cfg.iterations) / cfg.snapshots);
}

// ---------------------------------------------------------------------------
// Unconstrained and debiased

RunResult run_plain(const Problem& pb, const ModelSpec& spec, const SolverConfig& cfg,
                    const Rate& objective, double step, std::uint64_t run_seed,
                    const std::optional<FairnessSpec>& report) {
  Model model = Model::init(spec, cfg.seed);
  Adam adam(model.theta().size(), step, cfg.adam);
  Rng rng(run_seed);
  const std::vector<int> rows = all_rows(pb.train);
  RunResult run;
  run.step = step;
  int next = 1;
  for (int t = 1; t <= cfg.iterations; ++t) {
    double value = 0.0;
    std::vector<double> grad;
    if (pb.objective == ObjectiveKind::kMse) {
      const std::vector<int> batch =
          cfg.minibatch ? sample_rows(pb.train.size(), *cfg.minibatch, rng) : rows;
      MseValue mv = mse_with_gradient(model, pb.train, batch);
      value = -mv.value;
      grad = std::move(mv.gradient);
      for (double& g : grad) g = -g;
    } else {
      const RateWeight w{0, Bound::kLower, 1.0};
      if (cfg.minibatch) {
        const Rate r = sample_rate(objective, *cfg.minibatch, rng);
        SurrogateValue sv = weighted_surrogate(model, pb.train, std::span<const Rate>(&r, 1),
                                               std::span<const RateWeight>(&w, 1));
        value = sv.value;
        grad = std::move(sv.gradient);
      } else {
        SurrogateValue sv = weighted_surrogate(model, pb.train,
                                               std::span<const Rate>(&objective, 1),
                                               std::span<const RateWeight>(&w, 1));
        value = sv.value;
        grad = std::move(sv.gradient);
      }
    }
    adam.ascend(model.mutable_theta(), grad);
    if (next <= cfg.snapshots && t == snapshot_iteration(next, cfg)) {
      run.snapshots.push_back(make_snapshot(pb, t, model, value));
      ++next;
    }
  }
  run.model = StochasticModel::single(model);
  run.validation = evaluate_stochastic(run.model, pb.validation);
  run.validation_objective = validation_objective(run.validation.expected);
  if (report) run.validation_violation = violation(run.validation.expected, report->criterion);
  // Snapshot logs record the fairness criterion of interest when one is given.
  if (report) {
    for (Snapshot& s : run.snapshots) {
      const MaybeReal v = violation(s.validation, report->criterion);
      s.validation_values = {v.value_or(std::numeric_limits<double>::quiet_NaN())};
    }
  }
  return run;
}

TrainResult finish_plain(Method method, std::vector<RunResult> runs,
                         const std::optional<FairnessSpec>& report) {
  TrainResult tr;
  tr.method = method;
  tr.fairness = report;
  std::vector<RunScore> scores;
  for (const RunResult& r : runs) scores.push_back({r.validation_objective, std::nullopt});
  tr.chosen = select_step_size(scores, 0.0);
  tr.runs = std::move(runs);
  return tr;
}

}  // namespace

TrainResult train_unconstrained(const Dataset& dataset, const ModelSpec& spec,
                                const SolverConfig& cfg,
                                const std::optional<FairnessSpec>& report) {
  cfg.validate();
  const Problem pb = make_problem(dataset, cfg);
  auto runs = run_grid(cfg, [&](std::size_t r, double step) {
    return run_plain(pb, spec, cfg, pb.objective_rate, step, derive_seed(cfg.seed, r),
                     report);
  });
  return finish_plain(Method::kUnconstrained, std::move(runs), report);
}

DebiasWeights debias_weights(const Dataset& dataset, std::optional<SplitTag> split) {
  if (!dataset.protection().is_discrete() || dataset.protection().num_groups != 2) {
    throw ConfigError("debiased weighting needs exactly two discrete groups");
  }
  std::size_t n[2][2] = {{0, 0}, {0, 0}};  // [group][positive]
  for (int i : dataset.indices(split)) {
    ++n[*dataset[i].group][dataset[i].label > 0.0 ? 1 : 0];
  }
  for (int g = 0; g < 2; ++g) {
    if (n[g][0] == 0 || n[g][1] == 0) {
      throw DataError(fmt::format(
          "debiased weighting: group {} has no {} examples", g,
          n[g][0] == 0 ? "negative" : "positive"));
    }
  }
  DebiasWeights w;
  const double ratio0 = static_cast<double>(n[0][0]) / static_cast<double>(n[0][1]);
  const double ratio1 = static_cast<double>(n[1][0]) / static_cast<double>(n[1][1]);
  w.negative_group1 = ratio0 / ratio1;
  w.positives = n[0][1] + n[1][1];
  w.negatives = n[0][0] + n[1][0];
  return w;
}

TrainResult train_debiased(const Dataset& dataset, const ModelSpec& spec,
                           const SolverConfig& cfg,
                           const std::optional<FairnessSpec>& report) {
  cfg.validate();
  const Problem pb = make_problem(dataset, cfg);
  const DebiasWeights dw = debias_weights(pb.train, std::nullopt);
  auto alpha = [&](int i) {
    const Example& e = pb.train[i];
    return (*e.group == 1 && e.label <= 0.0) ? dw.negative_group1 : 1.0;
  };
  Rate weighted = pb.objective_rate;
  weighted.name = "weighted_auc";
  weighted.weights.reserve(weighted.pairs.size());
  for (const OrientedPair& p : weighted.pairs) {
    weighted.weights.push_back(alpha(p.first) * alpha(p.second));
  }
  weighted.normalizer = static_cast<double>(dw.positives) * static_cast<double>(dw.negatives);
  Problem auc_problem = pb;
  auc_problem.objective = ObjectiveKind::kAuc;
  auto runs = run_grid(cfg, [&](std::size_t r, double step) {
    return run_plain(auc_problem, spec, cfg, weighted, step, derive_seed(cfg.seed, r),
                     report);
  });
  return finish_plain(Method::kDebiased, std::move(runs), report);
}

// ---------------------------------------------------------------------------
// Proxy-Lagrangian game shared by the constrained and robust solvers.

namespace {

// Player payoffs for one problem formulation. `extra` holds parameters that
// are not part of the model (the robust slack variables xi).
struct Game {
  std::size_t num_extra = 0;
  std::vector<Rate> rates;
  // lambda-player gradient (length m + 1) from exact rates.
  std::function<std::vector<double>(std::span<const double> exact_rates,
                                    std::span<const double> extra)>
      slacks;
  // theta-player bound weights for the given lambda.
  std::function<std::vector<RateWeight>(std::span<const double> lambda)> weights;
  // theta-player terms that do not go through rates: value and gradients with
  // respect to theta (MSE objective) and extra.
  std::function<double(const Model&, std::span<const double> lambda,
                       std::span<const double> extra, std::vector<double>& grad_theta,
                       std::vector<double>& grad_extra, Rng& rng)>
      direct;
  std::size_t num_constraints = 0;
};

struct GameRun {
  std::vector<Snapshot> snapshots;
};

GameRun play(const Problem& pb, const ModelSpec& spec, const SolverConfig& cfg,
             const Game& game, double step, std::uint64_t run_seed) {
  Model model = Model::init(spec, cfg.seed);
  std::vector<double> extra(game.num_extra, 0.0);
  const std::size_t n_theta = model.theta().size();
  std::vector<double> params(n_theta + game.num_extra);
  Adam adam(params.size(), step, cfg.adam);
  LambdaState state =
      initial_lambda_state(game.num_constraints, cfg.initial_objective_weight);
  const double eta_lambda = step * cfg.lambda_step_ratio;
  Rng rng(run_seed);

  GameRun out;
  int next = 1;
  std::vector<Rate> sampled;
  for (int t = 1; t <= cfg.iterations; ++t) {
    const std::vector<Rate>* rates = &game.rates;
    if (cfg.minibatch) {
      sampled.clear();
      for (const Rate& r : game.rates) sampled.push_back(sample_rate(r, *cfg.minibatch, rng));
      rates = &sampled;
    }
    // lambda-player payoff at the current iterate.
    const std::vector<double> scores = score_all(model, pb.train);
    std::vector<double> exact(rates->size());
    for (std::size_t r = 0; r < exact.size(); ++r) exact[r] = exact_rate(scores, (*rates)[r]);
    const std::vector<double> g = game.slacks(exact, extra);

    // theta-player step.
    const std::vector<RateWeight> w = game.weights(state.lambda);
    SurrogateValue sv = weighted_surrogate(model, pb.train, *rates, w);
    std::vector<double> grad_extra(game.num_extra, 0.0);
    double value = sv.value;
    if (game.direct) {
      value += game.direct(model, state.lambda, extra, sv.gradient, grad_extra, rng);
    }
    std::copy(model.theta().begin(), model.theta().end(), params.begin());
    std::copy(extra.begin(), extra.end(), params.begin() + static_cast<std::ptrdiff_t>(n_theta));
    std::vector<double> grad(params.size());
    std::copy(sv.gradient.begin(), sv.gradient.end(), grad.begin());
    std::copy(grad_extra.begin(), grad_extra.end(),
              grad.begin() + static_cast<std::ptrdiff_t>(n_theta));
    adam.ascend(params, grad);
    std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(n_theta),
              model.mutable_theta().begin());
    std::copy(params.begin() + static_cast<std::ptrdiff_t>(n_theta), params.end(),
              extra.begin());

    state = swap_regret_update(state, g, eta_lambda);

    if (next <= cfg.snapshots && t == snapshot_iteration(next, cfg)) {
      Snapshot s = make_snapshot(pb, t, model, value);
      s.xi = extra;
      s.lambda = state.lambda;
      out.snapshots.push_back(std::move(s));
      ++next;
    }
  }
  return out;
}

// Validation value of sum_k coef_k * rate_k; NaN if any rate is undefined.
double combination_value(const Evaluation& e, const std::vector<Rate>& rates,
                         std::span<const LinearTerm> terms) {
  double v = 0.0;
  for (const LinearTerm& t : terms) {
    const MaybeReal r = lookup_rate(e, rates[t.rate].key);
    if (!r) return std::numeric_limits<double>::quiet_NaN();
    v += t.coef * *r;
  }
  return v;
}

void finish_run(RunResult& run, const Problem& pb) {
  run.validation = evaluate_stochastic(run.model, pb.validation);
  run.validation_objective = validation_objective(run.validation.expected);
}

StochasticModel mixture(const std::vector<Snapshot>& snaps, std::span<const double> p) {
  StochasticModel sm;
  for (std::size_t t = 0; t < snaps.size(); ++t) {
    if (p[t] > 0.0) {
      sm.models.push_back(snaps[t].model);
      sm.probabilities.push_back(p[t]);
    }
  }
  return sm;
}

}  // namespace

TrainResult train_constrained(const Dataset& dataset, const ModelSpec& spec,
                              const FairnessSpec& fairness, const SolverConfig& cfg) {
  cfg.validate();
  const Problem pb = make_problem(dataset, cfg);
  const ConstraintSet cs =
      build_constraints(fairness, pb.pairs, pb.parity ? &*pb.parity : nullptr);
  if (cs.size() == 0) {
    throw DataError("no active constraints on the training split");
  }
  const std::size_t m = cs.size();

  Game game;
  game.num_constraints = m;
  game.rates = cs.rates;
  const bool auc_objective = pb.objective == ObjectiveKind::kAuc;
  int obj_index = -1;
  if (auc_objective) {
    game.rates.push_back(pb.objective_rate);
    obj_index = static_cast<int>(game.rates.size()) - 1;
  }
  game.slacks = [&cs, m](std::span<const double> exact, std::span<const double>) {
    std::vector<double> g(m + 1, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
      double v = 0.0;
      for (const LinearTerm& t : cs.constraints[c].terms) v += t.coef * exact[t.rate];
      g[c + 1] = v - cs.constraints[c].bound;
    }
    return g;
  };
  game.weights = [&cs, m, obj_index](std::span<const double> lambda) {
    std::vector<RateWeight> w;
    if (obj_index >= 0) w.push_back({obj_index, Bound::kLower, lambda[0]});
    for (std::size_t c = 0; c < m; ++c) {
      append_combination(w, cs.constraints[c].terms, -lambda[c + 1], Bound::kUpper);
    }
    return w;
  };
  const std::vector<int> rows = all_rows(pb.train);
  game.direct = [&, m](const Model& model, std::span<const double> lambda,
                       std::span<const double>, std::vector<double>& grad_theta,
                       std::vector<double>&, Rng& rng) {
    double value = 0.0;
    for (std::size_t c = 0; c < m; ++c) value += lambda[c + 1] * cs.constraints[c].bound;
    if (!auc_objective) {
      const std::vector<int> batch =
          cfg.minibatch ? sample_rows(pb.train.size(), *cfg.minibatch, rng) : rows;
      const MseValue mv = mse_with_gradient(model, pb.train, batch);
      value -= lambda[0] * mv.value;
      for (std::size_t k = 0; k < grad_theta.size(); ++k) {
        grad_theta[k] -= lambda[0] * mv.gradient[k];
      }
    }
    return value;
  };

  auto runs = run_grid(cfg, [&](std::size_t r, double step) {
    GameRun gr = play(pb, spec, cfg, game, step, derive_seed(cfg.seed, r));
    RunResult run;
    run.step = step;
    run.warnings = cs.warnings;

    // Validation constraint values per snapshot; constraints undefined on
    // validation are left out of the shrink LP.
    std::vector<std::vector<double>> values(m, std::vector<double>(gr.snapshots.size()));
    std::vector<double> objective;
    for (std::size_t t = 0; t < gr.snapshots.size(); ++t) {
      Snapshot& s = gr.snapshots[t];
      for (std::size_t c = 0; c < m; ++c) {
        values[c][t] = combination_value(s.validation, cs.rates, cs.constraints[c].terms);
        s.validation_values.push_back(values[c][t]);
      }
      objective.push_back(s.validation_objective);
    }
    std::vector<std::vector<double>> lp_rows;
    std::vector<double> bounds;
    for (std::size_t c = 0; c < m; ++c) {
      if (std::any_of(values[c].begin(), values[c].end(),
                      [](double v) { return std::isnan(v); })) {
        run.warnings.push_back(fmt::format("constraint {} undefined on validation",
                                           cs.constraints[c].name));
        continue;
      }
      lp_rows.push_back(values[c]);
      bounds.push_back(cs.constraints[c].bound);
    }
    const ShrinkResult sr = shrink(objective, lp_rows, bounds);
    if (sr.feasible) {
      run.model = mixture(gr.snapshots, sr.probabilities);
    } else {
      run.shrink_fallback = true;
      run.warnings.push_back("shrink LP infeasible; using least-violating snapshot");
      std::size_t best = 0;
      double best_v = INFINITY;
      for (std::size_t t = 0; t < gr.snapshots.size(); ++t) {
        double worst = -INFINITY;
        for (std::size_t c = 0; c < lp_rows.size(); ++c) {
          worst = std::max(worst, lp_rows[c][t] - bounds[c]);
        }
        if (worst < best_v) {
          best_v = worst;
          best = t;
        }
      }
      run.model = StochasticModel::single(gr.snapshots[best].model);
    }
    run.snapshots = std::move(gr.snapshots);
    finish_run(run, pb);
    run.validation_violation = violation(run.validation.expected, fairness.criterion);
    return run;
  });

  TrainResult tr;
  tr.method = Method::kConstrained;
  tr.fairness = fairness;
  for (const Constraint& c : cs.constraints) tr.constraint_names.push_back(c.name);
  std::vector<RunScore> scores;
  for (const RunResult& r : runs) {
    scores.push_back({r.validation_objective, r.validation_violation});
  }
  tr.chosen = select_step_size(scores, fairness.epsilon, cfg.selection_tolerance);
  tr.runs = std::move(runs);
  return tr;
}

TrainResult train_robust(const Dataset& dataset, const ModelSpec& spec,
                         const FairnessSpec& fairness, const SolverConfig& cfg) {
  cfg.validate();
  const Problem pb = make_problem(dataset, cfg);
  const RobustGoal goal =
      build_robust_goal(fairness.criterion, pb.pairs, pb.parity ? &*pb.parity : nullptr);

  // Flatten terms: term c belongs to group group_of[c].
  std::vector<std::vector<LinearTerm>> terms;
  std::vector<int> group_of;
  std::vector<std::string> names;
  for (std::size_t g = 0; g < goal.groups.size(); ++g) {
    for (std::size_t k = 0; k < goal.groups[g].size(); ++k) {
      terms.push_back(goal.groups[g][k]);
      group_of.push_back(static_cast<int>(g));
      names.push_back(fmt::format("xi{}-{}", g, goal.names[g][k]));
    }
  }
  const std::size_t j = terms.size();
  const std::size_t groups = goal.groups.size();

  Game game;
  game.num_constraints = j;
  game.num_extra = groups;
  game.rates = goal.rates;
  game.slacks = [&, j](std::span<const double> exact, std::span<const double> xi) {
    std::vector<double> g(j + 1, 0.0);
    for (std::size_t c = 0; c < j; ++c) {
      double a = 0.0;
      for (const LinearTerm& t : terms[c]) a += t.coef * exact[t.rate];
      g[c + 1] = xi[group_of[c]] - a;
    }
    return g;
  };
  game.weights = [&, j](std::span<const double> lambda) {
    std::vector<RateWeight> w;
    for (std::size_t c = 0; c < j; ++c) {
      append_combination(w, terms[c], lambda[c + 1], Bound::kLower);
    }
    return w;
  };
  game.direct = [&, j, groups](const Model&, std::span<const double> lambda,
                               std::span<const double> xi, std::vector<double>&,
                               std::vector<double>& grad_xi, Rng&) {
    double value = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
      value += lambda[0] * xi[g];
      grad_xi[g] += lambda[0];
    }
    for (std::size_t c = 0; c < j; ++c) {
      value -= lambda[c + 1] * xi[group_of[c]];
      grad_xi[group_of[c]] -= lambda[c + 1];
    }
    return value;
  };

  auto runs = run_grid(cfg, [&](std::size_t r, double step) {
    GameRun gr = play(pb, spec, cfg, game, step, derive_seed(cfg.seed, r));
    RunResult run;
    run.step = step;
    std::vector<std::vector<double>> values(j, std::vector<double>(gr.snapshots.size()));
    for (std::size_t t = 0; t < gr.snapshots.size(); ++t) {
      Snapshot& s = gr.snapshots[t];
      for (std::size_t c = 0; c < j; ++c) {
        double v = combination_value(s.validation, goal.rates, terms[c]);
        // A term undefined on validation cannot bind.
        if (std::isnan(v)) v = 1e9;
        values[c][t] = v;
        s.validation_values.push_back(v);
      }
    }
    const ShrinkResult sr = shrink_robust(values, group_of, static_cast<int>(groups));
    if (sr.feasible) {
      run.model = mixture(gr.snapshots, sr.probabilities);
      run.robust_objective = sr.objective;
    } else {
      run.shrink_fallback = true;
      run.model = StochasticModel::single(gr.snapshots.back().model);
    }
    run.snapshots = std::move(gr.snapshots);
    finish_run(run, pb);
    run.validation_violation = violation(run.validation.expected, fairness.criterion);
    return run;
  });

  TrainResult tr;
  tr.method = Method::kRobust;
  tr.fairness = fairness;
  tr.constraint_names = names;
  std::vector<RunScore> scores;
  for (const RunResult& r : runs) scores.push_back({r.robust_objective, std::nullopt});
  tr.chosen = select_step_size(scores, fairness.epsilon, cfg.selection_tolerance);
  tr.runs = std::move(runs);
  return tr;
}

TrainResult train(Method method, const Dataset& dataset, const ModelSpec& spec,
                  const std::optional<FairnessSpec>& fairness,
                  const SolverConfig& cfg) {
  switch (method) {
    case Method::kUnconstrained:
      return train_unconstrained(dataset, spec, cfg, fairness);
    case Method::kDebiased:
      return train_debiased(dataset, spec, cfg, fairness);
    case Method::kConstrained:
    case Method::kRobust:
      if (!fairness) throw ConfigError("constrained and robust training need a criterion");
      return method == Method::kConstrained
                 ? train_constrained(dataset, spec, *fairness, cfg)
                 : train_robust(dataset, spec, *fairness, cfg);
  }
  throw ConfigError("unknown method");
}

namespace {

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt::format("{:.6f}", v[i]);
  }
  return s.empty() ? "-" : s;
}

std::string fmt_maybe(const MaybeReal& v) {
  return v ? fmt::format("{:.6f}", *v) : "nan";
}

}  // namespace

void write_run_log(std::ostream& out, const TrainResult& result) {
  out << "iteration\tlambda\ttrain_surrogate\tvalidation_objective\t"
         "validation_violation\tvalidation_values\n";
  const RunResult& run = result.best();
  for (const Snapshot& s : run.snapshots) {
    const MaybeReal v = result.fairness ? violation(s.validation, result.fairness->criterion)
                                        : MaybeReal();
    out << s.iteration << '\t' << join(s.lambda) << '\t'
        << fmt::format("{:.6f}", s.train_surrogate) << '\t'
        << fmt::format("{:.6f}", s.validation_objective) << '\t' << fmt_maybe(v) << '\t'
        << join(s.validation_values) << '\n';
  }
}

}  // namespace pairfair
