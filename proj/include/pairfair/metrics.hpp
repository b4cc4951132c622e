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

#ifndef PAIRFAIR_METRICS_HPP_
#define PAIRFAIR_METRICS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pairfair/dataset.hpp"
#include "pairfair/model.hpp"
#include "pairfair/stochastic_model.hpp"

namespace pairfair {

// A metric value that may be undefined (e.g. an empty pair cell). Undefined
// values are never coerced to zero.
using MaybeReal = std::optional<double>;

// Pairwise accuracies A_{i>j}: entry (i, j) is the fraction of pairs whose
// better-labeled member is in group i and worse-labeled member in group j that
// the scores order correctly. Score ties count as incorrect.
struct PairwiseAccuracyMatrix {
  int num_groups = 0;
  std::vector<MaybeReal> entries;    // K x K row major
  std::vector<std::int64_t> counts;  // K x K row major
  std::vector<MaybeReal> row_marginals;
  std::vector<MaybeReal> col_marginals;
  MaybeReal auc;

  MaybeReal at(int i, int j) const { return entries[i * num_groups + j]; }
  std::int64_t count(int i, int j) const { return counts[i * num_groups + j]; }
  bool operator==(const PairwiseAccuracyMatrix&) const = default;
};

// `scores` is indexed by example index. K = 1 gives the ungrouped AUC.
PairwiseAccuracyMatrix accuracy_matrix(std::span<const double> scores,
                                       const PairSet& pairs, int num_groups);

struct ContinuousAccuracies {
  MaybeReal greater;  // A_>: better member has the larger attribute
  MaybeReal less;     // A_<
};

ContinuousAccuracies continuous_accuracies(std::span<const double> scores,
                                           const PairSet& pairs);

// Fraction of unordered (G_i, G_j) couples where the G_i member scores
// strictly higher.
MaybeReal parity_accuracy(std::span<const double> scores,
                          const PairSet& parity_pairs, int i, int j);

// Mean squared error over the examples of `split`. Throws on an empty split.
double mse(std::span<const double> scores, const Dataset& dataset,
           std::optional<SplitTag> split);

// Fraction of correctly ordered pairs in `pairs` (pooled AUC).
MaybeReal pair_accuracy(std::span<const double> scores, const PairSet& pairs);

// Unweighted mean over query blocks of `metric`, skipping blocks where the
// metric is undefined.
MaybeReal per_query_average(const PairSet& pairs,
                            const std::function<MaybeReal(const PairSet&)>& metric);

// ---------------------------------------------------------------------------
// Criteria

enum class Criterion {
  kCrossGroupEo,
  kInGroupEa,
  kAllEntries,
  kMarginalEo,
  kStatisticalParity,
  kContinuousEo,
  kSymmetricEa,
};

std::string to_string(Criterion c);
Criterion parse_criterion(const std::string& name);
std::vector<Criterion> all_criteria();
// Whether the criterion can be evaluated on data with this protection.
bool compatible(Criterion c, const Protection& protection);

struct FairnessSpec {
  Criterion criterion = Criterion::kCrossGroupEo;
  double epsilon = 0.0;
};

// Everything measured for one scoring function on one split.
struct Evaluation {
  Protection protection;
  MaybeReal auc;
  std::optional<PairwiseAccuracyMatrix> matrix;  // discrete protection
  ContinuousAccuracies continuous;               // continuous protection
  std::vector<MaybeReal> parity;                 // K x K, discrete only
  MaybeReal mse;                                 // regression only
};

// Violation of `criterion` as a distance from equality, e.g. |A_{0>1} - A_{1>0}|
// for cross-group equal opportunity, maximized over group couples with defined
// inputs. Undefined when no couple is defined.
MaybeReal violation(const Evaluation& eval, Criterion criterion);

// Weighted mean of each field over the evaluations defining it. Counts are
// summed when `sum_counts` is set and taken from the first entry otherwise.
Evaluation combine(std::span<const Evaluation> evals,
                   std::span<const double> weights, bool sum_counts);

struct EvalOptions {
  // Average over queries (ranking datasets with more than one query).
  bool per_query = true;
  // Subsample regression pairs; nullopt enumerates all of them.
  std::optional<std::size_t> max_pairs;
  std::uint64_t pair_seed = 0;
};

// Precomputed pair sets for one split, so many scoring functions can be
// evaluated cheaply.
class Evaluator {
 public:
  Evaluator(const Dataset& dataset, std::optional<SplitTag> split,
            EvalOptions options = {});

  Evaluation evaluate(std::span<const double> scores) const;
  Evaluation evaluate(const Model& model) const;

  const Dataset& dataset() const { return *dataset_; }
  const PairSet& pairs() const { return pairs_; }
  const std::optional<PairSet>& parity_pairs() const { return parity_pairs_; }
  std::optional<SplitTag> split() const { return split_; }
  bool per_query() const { return per_query_; }

 private:
  Evaluation evaluate_pooled(std::span<const double> scores,
                             const PairSet& pairs) const;

  const Dataset* dataset_;
  std::optional<SplitTag> split_;
  PairSet pairs_;
  std::optional<PairSet> parity_pairs_;
  bool per_query_ = false;
};

// Scores of every example in the dataset, indexed like the dataset.
std::vector<double> score_all(const Model& model, const Dataset& dataset);

struct StochasticEvaluation {
  Evaluation expected;
  std::vector<Evaluation> atoms;
};

// Expected metrics over f ~ smodel, exact (probability-weighted per-atom
// metrics); violations are then read off the expected evaluation.
StochasticEvaluation evaluate_stochastic(const StochasticModel& smodel,
                                         const Evaluator& evaluator);

}  // namespace pairfair

#endif  // PAIRFAIR_METRICS_HPP_
