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

#include "pairfair/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "pairfair/errors.hpp"

namespace pairfair {

namespace {

struct Tally {
  std::vector<std::int64_t> count;
  std::vector<std::int64_t> correct;

  explicit Tally(int cells) : count(cells, 0), correct(cells, 0) {}
};

Tally tally(std::span<const double> scores, std::span<const Pair> pairs, int cells) {
  Tally t(cells);
  for (const Pair& p : pairs) {
    ++t.count[p.cell];
    if (scores[p.better] > scores[p.worse]) ++t.correct[p.cell];
  }
  return t;
}

MaybeReal ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

PairwiseAccuracyMatrix matrix_from_tally(const Tally& t, int k) {
  PairwiseAccuracyMatrix m;
  m.num_groups = k;
  m.counts = t.count;
  m.entries.resize(k * k);
  m.row_marginals.resize(k);
  m.col_marginals.resize(k);
  std::int64_t all_n = 0, all_c = 0;
  for (int i = 0; i < k; ++i) {
    std::int64_t rn = 0, rc = 0, cn = 0, cc = 0;
    for (int j = 0; j < k; ++j) {
      const int ij = i * k + j;
      const int ji = j * k + i;
      m.entries[ij] = ratio(t.correct[ij], t.count[ij]);
      rn += t.count[ij];
      rc += t.correct[ij];
      cn += t.count[ji];
      cc += t.correct[ji];
    }
    m.row_marginals[i] = ratio(rc, rn);
    m.col_marginals[i] = ratio(cc, cn);
    all_n += rn;
    all_c += rc;
  }
  m.auc = ratio(all_c, all_n);
  return m;
}

std::span<const Pair> block_span(const PairSet& pairs, const QueryBlock& b) {
  return std::span<const Pair>(pairs.pairs()).subspan(b.begin, b.end - b.begin);
}

}  // namespace

PairwiseAccuracyMatrix accuracy_matrix(std::span<const double> scores,
                                       const PairSet& pairs, int num_groups) {
  if (num_groups < 1) throw DataError("accuracy matrix needs K >= 1");
  if (num_groups == 1) {
    Tally all(1);
    for (const Pair& p : pairs.pairs()) {
      ++all.count[0];
      if (scores[p.better] > scores[p.worse]) ++all.correct[0];
    }
    return matrix_from_tally(all, 1);
  }
  if (pairs.num_cells() != num_groups * num_groups) {
    throw DataError("pair cells do not match the requested group count");
  }
  return matrix_from_tally(tally(scores, pairs.pairs(), pairs.num_cells()),
                           num_groups);
}

ContinuousAccuracies continuous_accuracies(std::span<const double> scores,
                                           const PairSet& pairs) {
  if (!pairs.protection().is_continuous()) {
    throw DataError("continuous accuracies need a continuous attribute");
  }
  const Tally t = tally(scores, pairs.pairs(), pairs.num_cells());
  return {ratio(t.correct[kCellGreater], t.count[kCellGreater]),
          ratio(t.correct[kCellLess], t.count[kCellLess])};
}

namespace {

// Wins of the lower-group member and of the higher-group member per cell.
struct ParityTally {
  std::vector<std::int64_t> count, low_wins, high_wins;
};

ParityTally parity_tally(std::span<const double> scores, std::span<const Pair> pairs,
                         int cells) {
  ParityTally t{std::vector<std::int64_t>(cells, 0),
                std::vector<std::int64_t>(cells, 0),
                std::vector<std::int64_t>(cells, 0)};
  for (const Pair& p : pairs) {
    ++t.count[p.cell];
    if (scores[p.better] > scores[p.worse]) ++t.low_wins[p.cell];
    if (scores[p.worse] > scores[p.better]) ++t.high_wins[p.cell];
  }
  return t;
}

std::vector<MaybeReal> parity_matrix(const ParityTally& t, int k) {
  std::vector<MaybeReal> out(k * k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const int c = i * k + j;
      out[i * k + j] = ratio(t.low_wins[c], t.count[c]);
      out[j * k + i] = ratio(t.high_wins[c], t.count[c]);
    }
  }
  return out;
}

}  // namespace

MaybeReal parity_accuracy(std::span<const double> scores,
                          const PairSet& parity_pairs, int i, int j) {
  if (parity_pairs.mode() != PairMode::kParity) {
    throw DataError("parity accuracy needs parity pairs");
  }
  if (i == j) throw DataError("parity accuracy needs two distinct groups");
  const int k = parity_pairs.protection().num_groups;
  const ParityTally t =
      parity_tally(scores, parity_pairs.pairs(), parity_pairs.num_cells());
  return parity_matrix(t, k)[i * k + j];
}

double mse(std::span<const double> scores, const Dataset& dataset,
           std::optional<SplitTag> split) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!dataset.in_split(i, split)) continue;
    const double r = scores[i] - dataset[i].label;
    sum += r * r;
    ++n;
  }
  if (n == 0) throw DataError("mse over an empty split");
  return sum / static_cast<double>(n);
}

MaybeReal pair_accuracy(std::span<const double> scores, const PairSet& pairs) {
  std::int64_t c = 0;
  for (const Pair& p : pairs.pairs()) {
    if (scores[p.better] > scores[p.worse]) ++c;
  }
  return ratio(c, static_cast<std::int64_t>(pairs.size()));
}

MaybeReal per_query_average(const PairSet& pairs,
                            const std::function<MaybeReal(const PairSet&)>& metric) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < pairs.blocks().size(); ++b) {
    const MaybeReal v = metric(pairs.block(b));
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Criteria

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::kCrossGroupEo:
      return "cross_group_eo";
    case Criterion::kInGroupEa:
      return "in_group_ea";
    case Criterion::kAllEntries:
      return "all_entries";
    case Criterion::kMarginalEo:
      return "marginal_eo";
    case Criterion::kStatisticalParity:
      return "statistical_parity";
    case Criterion::kContinuousEo:
      return "continuous_eo";
    case Criterion::kSymmetricEa:
      return "symmetric_ea";
  }
  return "?";
}

std::vector<Criterion> all_criteria() {
  return {Criterion::kCrossGroupEo,      Criterion::kInGroupEa,
          Criterion::kAllEntries,        Criterion::kMarginalEo,
          Criterion::kStatisticalParity, Criterion::kContinuousEo,
          Criterion::kSymmetricEa};
}

Criterion parse_criterion(const std::string& name) {
  for (Criterion c : all_criteria()) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError(fmt::format("unknown fairness criterion '{}'", name));
}

bool compatible(Criterion c, const Protection& protection) {
  if (c == Criterion::kContinuousEo) return protection.is_continuous();
  return protection.is_discrete() && protection.num_groups >= 2;
}

namespace {

MaybeReal max_defined(MaybeReal a, MaybeReal b) {
  if (!a) return b;
  if (!b) return a;
  return std::max(*a, *b);
}

// max over i < j of |value(i) - value(j)| where both are defined.
template <typename F>
MaybeReal max_abs_gap(int k, F&& value) {
  MaybeReal best;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const MaybeReal a = value(i, j);
      const MaybeReal b = value(j, i);
      if (a && b) best = max_defined(best, std::abs(*a - *b));
    }
  }
  return best;
}

}  // namespace

MaybeReal violation(const Evaluation& eval, Criterion criterion) {
  if (criterion == Criterion::kContinuousEo) {
    if (!eval.continuous.greater || !eval.continuous.less) return std::nullopt;
    return std::abs(*eval.continuous.greater - *eval.continuous.less);
  }
  if (!eval.matrix) return std::nullopt;
  const PairwiseAccuracyMatrix& m = *eval.matrix;
  const int k = m.num_groups;
  switch (criterion) {
    case Criterion::kCrossGroupEo:
      return max_abs_gap(k, [&](int i, int j) { return m.at(i, j); });
    case Criterion::kInGroupEa:
      return max_abs_gap(k, [&](int i, int) { return m.at(i, i); });
    case Criterion::kAllEntries:
      return max_defined(violation(eval, Criterion::kCrossGroupEo),
                         violation(eval, Criterion::kInGroupEa));
    case Criterion::kMarginalEo:
      return max_abs_gap(k, [&](int i, int) { return m.row_marginals[i]; });
    case Criterion::kSymmetricEa:
      return max_abs_gap(k, [&](int i, int) -> MaybeReal {
        if (!m.row_marginals[i] || !m.col_marginals[i]) return std::nullopt;
        return *m.row_marginals[i] + *m.col_marginals[i];
      });
    case Criterion::kStatisticalParity:
      if (eval.parity.empty()) return std::nullopt;
      return max_abs_gap(k, [&](int i, int j) { return eval.parity[i * k + j]; });
    case Criterion::kContinuousEo:
      break;
  }
  return std::nullopt;
}

namespace {

struct Averager {
  double sum = 0.0;
  double weight = 0.0;
  void add(const MaybeReal& v, double w) {
    if (v) {
      sum += w * *v;
      weight += w;
    }
  }
  MaybeReal get() const {
    if (weight <= 0.0) return std::nullopt;
    return sum / weight;
  }
};

MaybeReal average_field(std::span<const Evaluation> evals, std::span<const double> w,
                        const std::function<MaybeReal(const Evaluation&)>& field) {
  Averager a;
  for (std::size_t t = 0; t < evals.size(); ++t) a.add(field(evals[t]), w[t]);
  return a.get();
}

}  // namespace

Evaluation combine(std::span<const Evaluation> evals, std::span<const double> weights,
                   bool sum_counts) {
  if (evals.empty()) throw DataError("nothing to combine");
  if (weights.size() != evals.size()) throw DataError("weight count mismatch");
  Evaluation out;
  out.protection = evals[0].protection;
  out.auc = average_field(evals, weights, [](const Evaluation& e) { return e.auc; });
  out.mse = average_field(evals, weights, [](const Evaluation& e) { return e.mse; });
  out.continuous.greater = average_field(
      evals, weights, [](const Evaluation& e) { return e.continuous.greater; });
  out.continuous.less = average_field(
      evals, weights, [](const Evaluation& e) { return e.continuous.less; });

  if (evals[0].matrix) {
    const int k = evals[0].matrix->num_groups;
    PairwiseAccuracyMatrix m;
    m.num_groups = k;
    m.entries.resize(k * k);
    m.counts.assign(k * k, 0);
    m.row_marginals.resize(k);
    m.col_marginals.resize(k);
    for (int c = 0; c < k * k; ++c) {
      m.entries[c] = average_field(evals, weights, [c](const Evaluation& e) {
        return e.matrix->entries[c];
      });
      for (const Evaluation& e : evals) {
        m.counts[c] += e.matrix->counts[c];
        if (!sum_counts) break;
      }
    }
    for (int i = 0; i < k; ++i) {
      m.row_marginals[i] = average_field(
          evals, weights, [i](const Evaluation& e) { return e.matrix->row_marginals[i]; });
      m.col_marginals[i] = average_field(
          evals, weights, [i](const Evaluation& e) { return e.matrix->col_marginals[i]; });
    }
    m.auc = average_field(evals, weights,
                          [](const Evaluation& e) { return e.matrix->auc; });
    out.matrix = std::move(m);
  }
  if (!evals[0].parity.empty()) {
    const std::size_t n = evals[0].parity.size();
    out.parity.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
      out.parity[c] = average_field(evals, weights, [c](const Evaluation& e) {
        return e.parity.empty() ? MaybeReal() : e.parity[c];
      });
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluator

std::vector<double> score_all(const Model& model, const Dataset& dataset) {
  std::vector<double> s(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    s[i] = model.score(dataset[i].features);
  }
  return s;
}

namespace {

std::size_t count_queries(const Dataset& ds) {
  if (ds.task() != Task::kRanking) return 0;
  std::vector<std::int64_t> q;
  for (const Example& e : ds.examples()) q.push_back(*e.query_id);
  std::sort(q.begin(), q.end());
  return static_cast<std::size_t>(std::unique(q.begin(), q.end()) - q.begin());
}

}  // namespace

Evaluator::Evaluator(const Dataset& dataset, std::optional<SplitTag> split,
                     EvalOptions options)
    : dataset_(&dataset),
      split_(split),
      pairs_(enumerate_pairs(dataset, split, options.max_pairs, options.pair_seed)) {
  if (dataset.protection().is_discrete()) {
    parity_pairs_ = enumerate_parity_pairs(dataset, split);
  }
  per_query_ = options.per_query && count_queries(dataset) > 1;
}

Evaluation Evaluator::evaluate_pooled(std::span<const double> scores,
                                      const PairSet& pairs) const {
  Evaluation e;
  e.protection = dataset_->protection();
  const Tally t = tally(scores, pairs.pairs(), pairs.num_cells());
  const std::int64_t n = std::accumulate(t.count.begin(), t.count.end(), std::int64_t{0});
  const std::int64_t c =
      std::accumulate(t.correct.begin(), t.correct.end(), std::int64_t{0});
  e.auc = ratio(c, n);
  if (e.protection.is_discrete()) {
    e.matrix = matrix_from_tally(t, e.protection.num_groups);
  } else if (e.protection.is_continuous()) {
    e.continuous = {ratio(t.correct[kCellGreater], t.count[kCellGreater]),
                    ratio(t.correct[kCellLess], t.count[kCellLess])};
  }
  return e;
}

Evaluation Evaluator::evaluate(std::span<const double> scores) const {
  if (scores.size() != dataset_->size()) {
    throw DataError("score vector does not match the dataset");
  }
  const Protection& pr = dataset_->protection();
  const int k = pr.num_groups;
  Evaluation out;
  if (!per_query_) {
    out = evaluate_pooled(scores, pairs_);
    if (parity_pairs_) {
      out.parity = parity_matrix(
          parity_tally(scores, parity_pairs_->pairs(), parity_pairs_->num_cells()), k);
    }
  } else {
    std::vector<Evaluation> per_block;
    per_block.reserve(pairs_.blocks().size());
    const int cells = pairs_.num_cells();
    for (const QueryBlock& b : pairs_.blocks()) {
      Evaluation e;
      e.protection = pr;
      const Tally t = tally(scores, block_span(pairs_, b), cells);
      const std::int64_t n =
          std::accumulate(t.count.begin(), t.count.end(), std::int64_t{0});
      const std::int64_t c =
          std::accumulate(t.correct.begin(), t.correct.end(), std::int64_t{0});
      e.auc = ratio(c, n);
      if (pr.is_discrete()) {
        e.matrix = matrix_from_tally(t, k);
      } else if (pr.is_continuous()) {
        e.continuous = {ratio(t.correct[kCellGreater], t.count[kCellGreater]),
                        ratio(t.correct[kCellLess], t.count[kCellLess])};
      }
      per_block.push_back(std::move(e));
    }
    if (per_block.empty()) {
      out = evaluate_pooled(scores, pairs_);
    } else {
      const std::vector<double> w(per_block.size(), 1.0);
      out = combine(per_block, w, /*sum_counts=*/true);
    }
    if (parity_pairs_) {
      std::vector<Evaluation> pblocks;
      for (const QueryBlock& b : parity_pairs_->blocks()) {
        Evaluation e;
        e.protection = pr;
        e.parity = parity_matrix(
            parity_tally(scores, block_span(*parity_pairs_, b),
                         parity_pairs_->num_cells()),
            k);
        pblocks.push_back(std::move(e));
      }
      if (!pblocks.empty()) {
        const std::vector<double> w(pblocks.size(), 1.0);
        out.parity = combine(pblocks, w, false).parity;
      } else {
        out.parity.assign(k * k, std::nullopt);
      }
    }
  }
  if (dataset_->task() == Task::kRegression) {
    out.mse = mse(scores, *dataset_, split_);
  }
  return out;
}

Evaluation Evaluator::evaluate(const Model& model) const {
  return evaluate(score_all(model, *dataset_));
}

StochasticEvaluation evaluate_stochastic(const StochasticModel& smodel,
                                         const Evaluator& evaluator) {
  smodel.validate();
  StochasticEvaluation out;
  for (const Model& m : smodel.models) out.atoms.push_back(evaluator.evaluate(m));
  out.expected = combine(out.atoms, smodel.probabilities, /*sum_counts=*/false);
  return out;
}

// ---------------------------------------------------------------------------
// StochasticModel

void StochasticModel::validate() const {
  if (models.empty()) throw DataError("stochastic model has no atoms");
  if (models.size() != probabilities.size()) {
    throw DataError("stochastic model: atom/probability count mismatch");
  }
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw DataError("stochastic model: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw DataError(fmt::format("stochastic model: probabilities sum to {:.17g}", sum));
  }
}

std::size_t StochasticModel::mode() const {
  return static_cast<std::size_t>(
      std::max_element(probabilities.begin(), probabilities.end()) -
      probabilities.begin());
}

void write_stochastic_model(std::ostream& out, const StochasticModel& smodel) {
  smodel.validate();
  out << "pairfair-stochastic 1\n";
  out << "atoms " << smodel.size() << '\n';
  for (std::size_t t = 0; t < smodel.size(); ++t) {
    out << fmt::format("probability {:.17g}\n", smodel.probabilities[t]);
    write_model(out, smodel.models[t]);
  }
}

StochasticModel read_stochastic_model(std::istream& in) {
  std::string tok;
  const std::streampos start = in.tellg();
  if (!(in >> tok)) throw DataError("model file is empty");
  if (tok == "pairfair-model") {
    in.seekg(start);
    return StochasticModel::single(read_model(in));
  }
  if (tok != "pairfair-stochastic") {
    throw DataError(fmt::format("model file: unexpected header '{}'", tok));
  }
  int version = 0;
  in >> version;
  if (version != 1) throw DataError("stochastic model: unsupported version");
  std::size_t n = 0;
  in >> tok >> n;
  if (!in || tok != "atoms") throw DataError("stochastic model: malformed header");
  StochasticModel sm;
  for (std::size_t t = 0; t < n; ++t) {
    std::string p;
    in >> tok >> p;
    if (!in || tok != "probability") {
      throw DataError("stochastic model: malformed atom header");
    }
    sm.probabilities.push_back(std::stod(p));
    sm.models.push_back(read_model(in));
  }
  sm.validate();
  return sm;
}

}  // namespace pairfair
