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

#ifndef PAIRFAIR_SOLVER_HPP_
#define PAIRFAIR_SOLVER_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pairfair/dataset.hpp"
#include "pairfair/metrics.hpp"
#include "pairfair/model.hpp"
#include "pairfair/stochastic_model.hpp"
#include "pairfair/surrogate.hpp"

namespace pairfair {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct SolverConfig {
  int iterations = 2500;
  // Candidate step sizes. eta_lambda = lambda_step_ratio * eta_theta.
  std::vector<double> step_grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  double lambda_step_ratio = 1.0;
  int snapshots = 100;
  std::uint64_t seed = 0;
  AdamConfig adam;
  // Pairs sampled per rate (or examples for the MSE objective) per iteration.
  std::optional<int> minibatch;
  // Regression pair subsample size for training and evaluation.
  std::optional<std::size_t> max_pairs;
  // Initial lambda weight on the objective coordinate.
  double initial_objective_weight = 0.5;
  // Step-size selection accepts runs with validation violation <= eps + this.
  double selection_tolerance = 0.01;
  // Worker threads for the step-size grid; 0 uses the hardware count.
  int threads = 0;

  void validate() const;
};

enum class Method { kUnconstrained, kDebiased, kConstrained, kRobust };
std::string to_string(Method m);
Method parse_method(const std::string& s);

class Adam {
 public:
  Adam(std::size_t n, double step, AdamConfig cfg);
  // Ascent step: params += step * mhat / (sqrt(vhat) + eps).
  void ascend(std::vector<double>& params, const std::vector<double>& gradient);

 private:
  double step_;
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  int t_ = 0;
};

struct Snapshot {
  int iteration = 0;
  Model model;
  std::vector<double> xi;      // robust only
  std::vector<double> lambda;  // empty for unconstrained/debiased
  double train_surrogate = 0.0;
  Evaluation validation;
  // Validation AUC (ranking) or -MSE (regression); larger is better.
  double validation_objective = 0.0;
  // Per constraint (constrained) or per accuracy term (robust), on validation.
  std::vector<double> validation_values;
};

// One run at one step size.
struct RunResult {
  double step = 0.0;
  StochasticModel model;
  std::vector<Snapshot> snapshots;
  StochasticEvaluation validation;
  double validation_objective = 0.0;
  MaybeReal validation_violation;
  // Robust: sum over goal groups of the minimum validation accuracy.
  double robust_objective = 0.0;
  bool shrink_fallback = false;
  std::vector<std::string> warnings;
};

struct TrainResult {
  Method method = Method::kUnconstrained;
  std::optional<FairnessSpec> fairness;
  std::vector<std::string> constraint_names;
  std::vector<RunResult> runs;  // one per grid value, in grid order
  std::size_t chosen = 0;

  const RunResult& best() const { return runs.at(chosen); }
};

// Candidate for step-size selection.
struct RunScore {
  double objective = 0.0;  // larger is better
  MaybeReal violation;
};

// Among runs with violation <= epsilon + tolerance, the largest objective;
// otherwise the smallest violation. Undefined violations count as feasible.
std::size_t select_step_size(std::span<const RunScore> runs, double epsilon,
                             double tolerance = 0.01);

// Unconstrained AUC (ranking) or MSE (regression) training. Returns the final
// iterate of the best-validated grid run.
TrainResult train_unconstrained(const Dataset& dataset, const ModelSpec& spec,
                                const SolverConfig& cfg,
                                const std::optional<FairnessSpec>& report = {});

// Label-proportion-balanced weights for the debiased objective (K = 2).
struct DebiasWeights {
  double negative_group1 = 1.0;  // alpha_{1,-1}; every other alpha is 1
  std::size_t positives = 0;
  std::size_t negatives = 0;
};
DebiasWeights debias_weights(const Dataset& dataset, std::optional<SplitTag> split);

TrainResult train_debiased(const Dataset& dataset, const ModelSpec& spec,
                           const SolverConfig& cfg,
                           const std::optional<FairnessSpec>& report = {});

TrainResult train_constrained(const Dataset& dataset, const ModelSpec& spec,
                              const FairnessSpec& fairness, const SolverConfig& cfg);

TrainResult train_robust(const Dataset& dataset, const ModelSpec& spec,
                         const FairnessSpec& fairness, const SolverConfig& cfg);

TrainResult train(Method method, const Dataset& dataset, const ModelSpec& spec,
                  const std::optional<FairnessSpec>& fairness,
                  const SolverConfig& cfg);

// Tab-separated run log: a header line, then one line per snapshot.
void write_run_log(std::ostream& out, const TrainResult& result);

// The training split as a standalone dataset (examples re-indexed).
Dataset train_subset(const Dataset& dataset);

// Evaluation options used for validation during training; reuse them to
// reproduce the logged metrics.
EvalOptions evaluation_options(const SolverConfig& cfg);

}  // namespace pairfair

#endif  // PAIRFAIR_SOLVER_HPP_
