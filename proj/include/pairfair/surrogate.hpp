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

#ifndef PAIRFAIR_SURROGATE_HPP_
#define PAIRFAIR_SURROGATE_HPP_

#include <span>
#include <string>
#include <vector>

#include "pairfair/dataset.hpp"
#include "pairfair/metrics.hpp"
#include "pairfair/model.hpp"

namespace pairfair {

// Value and subderivative of a hinge bound at one point.
struct HingeValue {
  double value = 0.0;
  double slope = 0.0;
};

// l(d) = 1 - max(0, 1 - d) <= 1[d > 0]; slope 1 for d <= 1, else 0.
HingeValue hinge_lower(double d);
// u(d) = max(0, 1 + d) >= 1[d > 0]; slope 1 for d >= -1, else 0.
HingeValue hinge_upper(double d);

// A pair whose indicator is 1[f(first) > f(second)].
struct OrientedPair {
  int first = 0;
  int second = 0;
};

// A positive-prediction rate over score differences:
//   rate = sum_p w_p 1[f(first_p) > f(second_p)] / normalizer
// with w_p = 1 when `weights` is empty and normalizer defaulting to the pair
// count. All pairwise accuracies (cells, marginals, AUC, parity, continuous)
// are rates of this form.
struct RateKey {
  enum class Kind { kAll, kCell, kRow, kCol, kGreater, kLess, kParity };
  Kind kind = Kind::kAll;
  int i = 0;
  int j = 0;
};

struct Rate {
  std::string name;
  RateKey key;
  std::vector<OrientedPair> pairs;
  std::vector<double> weights;
  double normalizer = 0.0;

  bool empty() const { return pairs.empty(); }
  double denominator() const {
    return normalizer > 0.0 ? normalizer : static_cast<double>(pairs.size());
  }
};

Rate rate_all(const PairSet& pairs, std::string name = "auc");
Rate rate_cells(const PairSet& pairs, std::span<const int> cells, std::string name);
Rate rate_cell(const PairSet& pairs, int i, int j);
Rate rate_row(const PairSet& pairs, int i);
Rate rate_col(const PairSet& pairs, int i);
Rate rate_continuous(const PairSet& pairs, bool greater);
// P(G_i member scores above the G_j member) over parity couples.
Rate rate_parity(const PairSet& parity_pairs, int i, int j);

double exact_rate(std::span<const double> scores, const Rate& rate);

// The metric a rate key denotes, read from an evaluation (which may be
// averaged over queries).
MaybeReal lookup_rate(const Evaluation& eval, const RateKey& key);

struct LinearTerm {
  int rate = 0;
  double coef = 1.0;
};

// sum_k coef_k * rate_k <= bound.
struct Constraint {
  std::string name;
  std::vector<LinearTerm> terms;
  double bound = 0.0;
};

struct ConstraintSet {
  std::vector<Rate> rates;
  std::vector<Constraint> constraints;
  // Constraints dropped because one of their rates had no pairs.
  std::vector<std::string> warnings;

  std::size_t size() const { return constraints.size(); }
  int add_rate(Rate r);
};

// The difference-form constraints of a fairness criterion, in both directions
// for every group couple; e.g. cross_group_eo with K = 2 gives
// {A_{0>1} - A_{1>0} <= eps, A_{1>0} - A_{0>1} <= eps}. `parity_pairs` is
// required for statistical parity only.
ConstraintSet build_constraints(const FairnessSpec& spec, const PairSet& pairs,
                                const PairSet* parity_pairs);

// Robust goal: maximize sum over groups of min over the group's accuracy
// terms. Each accuracy term is a nonnegative combination of rates.
struct RobustGoal {
  std::vector<Rate> rates;
  std::vector<std::vector<std::vector<LinearTerm>>> groups;
  std::vector<std::vector<std::string>> names;

  std::size_t num_terms() const;
};

RobustGoal build_robust_goal(Criterion criterion, const PairSet& pairs,
                             const PairSet* parity_pairs);

// ---------------------------------------------------------------------------
// Surrogate evaluation

enum class Bound { kLower, kUpper };

// weight * (mean hinge bound of `rate`).
struct RateWeight {
  int rate = 0;
  Bound bound = Bound::kLower;
  double weight = 0.0;
};

struct SurrogateValue {
  double value = 0.0;
  std::vector<double> gradient;  // over theta
};

// Sum of weighted hinge-bound rates and its gradient. Example indices in the
// rates refer to `dataset`.
SurrogateValue weighted_surrogate(const Model& model, const Dataset& dataset,
                                  std::span<const Rate> rates,
                                  std::span<const RateWeight> weights);

// Mean l(f(x) - f(x')) over the pairs; always <= the exact pairwise accuracy.
SurrogateValue surrogate_auc(const Model& model, const Dataset& dataset,
                             const PairSet& pairs);

// Upper bound on sum_k coef_k * rate_k: upper hinges for positive
// coefficients, lower hinges for negative ones.
SurrogateValue surrogate_delta(const Model& model, const Dataset& dataset,
                               const ConstraintSet& constraints, std::size_t c);

// Appends `scale` times a hinge bound on sum_k coef_k * rate_k. For an upper
// bound, positive coefficients take the upper hinge and negative ones the
// lower hinge; a lower bound swaps them.
void append_combination(std::vector<RateWeight>& out,
                        std::span<const LinearTerm> terms, double scale,
                        Bound which);

// L_theta = lambda_0 * l-surrogate(objective) - sum_c lambda_{c+1} *
// (surrogate_delta_c - bound_c), to be maximized over theta. `lambda` has
// m + 1 entries on the simplex.
SurrogateValue proxy_lagrangian_theta(const Model& model, const Dataset& dataset,
                                      std::span<const double> lambda,
                                      const Rate& objective,
                                      const ConstraintSet& constraints);

// Payoff gradient of the lambda-player: [0, Delta_1 - bound_1, ..., Delta_m -
// bound_m] computed with exact indicators.
std::vector<double> lagrangian_lambda(std::span<const double> scores,
                                      const ConstraintSet& constraints);
std::vector<double> lagrangian_lambda(const Model& model, const Dataset& dataset,
                                      const ConstraintSet& constraints);

// Swap-regret state of the lambda-player: a column-stochastic (m+1)x(m+1)
// matrix and its stationary distribution. The matrix is kept in log space so
// entries can shrink by many orders of magnitude and recover.
struct LambdaState {
  std::size_t n = 0;           // number of constraints + 1
  std::vector<double> log_m;   // row major
  std::vector<double> matrix;  // exp(log_m), columns sum to 1
  std::vector<double> lambda;

  std::size_t dim() const { return n; }
  double at(std::size_t row, std::size_t col) const {
    return matrix[row * dim() + col];
  }
};

}  // namespace pairfair

#endif  // PAIRFAIR_SURROGATE_HPP_
