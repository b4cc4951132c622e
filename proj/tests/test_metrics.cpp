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

#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "pairfair/errors.hpp"
#include "pairfair/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace pairfair {
namespace {

using testing::random_ranking;
using testing::random_scores;
using testing::brute_force;
using testing::MetricsOracle;

void expect_maybe_eq(const MaybeReal& got, double num, double den) {
  if (den == 0) {
    EXPECT_FALSE(got.has_value());
  } else {
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(*got, num / den);
  }
}

TEST(AccuracyMatrix, MatchesBruteForceOn50RandomDatasets) {
  Rng rng(100);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = 2 + static_cast<int>(rng.below(3));
    const Dataset ds = random_ranking(rng, 1 + static_cast<int>(rng.below(12)), 16, k);
    ASSERT_LE(ds.size(), 200u);
    // Few score levels so ties occur.
    const auto s = random_scores(rng, ds.size(), 4);
    const PairSet ps = enumerate_pairs(ds, std::nullopt);
    const PairwiseAccuracyMatrix m = accuracy_matrix(s, ps, k);
    const MetricsOracle o = brute_force(ds, s, k);
    for (int i = 0; i < k; ++i) {
      double rw = 0, rc = 0, cw = 0, cc = 0;
      for (int j = 0; j < k; ++j) {
        expect_maybe_eq(m.at(i, j), o.wins[i * k + j], o.count[i * k + j]);
        EXPECT_EQ(m.count(i, j), o.count[i * k + j]);
        rw += o.wins[i * k + j];
        rc += o.count[i * k + j];
        cw += o.wins[j * k + i];
        cc += o.count[j * k + i];
      }
      expect_maybe_eq(m.row_marginals[i], rw, rc);
      expect_maybe_eq(m.col_marginals[i], cw, cc);
    }
    expect_maybe_eq(m.auc, o.auc_wins, o.auc_count);
  }
}

TEST(AccuracyMatrix, MonotoneTransformIsBitIdentical) {
  Rng rng(101);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset ds = random_ranking(rng, 10, 12, 3);
    const auto s = random_scores(rng, ds.size(), rep % 2 ? 5 : 0);
    std::vector<double> t(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) t[i] = 2 * s[i] + 1;
    const Evaluator ev(ds, std::nullopt);
    const Evaluation a = ev.evaluate(s);
    const Evaluation b = ev.evaluate(t);
    EXPECT_EQ(a.matrix->entries, b.matrix->entries);
    EXPECT_EQ(a.matrix->row_marginals, b.matrix->row_marginals);
    EXPECT_EQ(a.matrix->col_marginals, b.matrix->col_marginals);
    EXPECT_EQ(a.auc, b.auc);
    EXPECT_EQ(a.parity, b.parity);
  }
}

TEST(AccuracyMatrix, PerfectAndAntiScorers) {
  Rng rng(102);
  const Dataset ds = random_ranking(rng, 30, 8, 2);
  std::vector<double> perfect(ds.size()), anti(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    perfect[i] = ds[i].label;
    anti[i] = -ds[i].label;
  }
  const Evaluator ev(ds, std::nullopt);
  const Evaluation p = ev.evaluate(perfect);
  const Evaluation a = ev.evaluate(anti);
  for (int c = 0; c < 4; ++c) {
    ASSERT_TRUE(p.matrix->entries[c]);
    EXPECT_EQ(*p.matrix->entries[c], 1.0);
    EXPECT_EQ(*a.matrix->entries[c], 0.0);
  }
  EXPECT_EQ(*p.auc, 1.0);
  EXPECT_EQ(*a.auc, 0.0);
}

TEST(AccuracyMatrix, TiesCountAsWrongAndEmptyCellsAreUndefined) {
  // One query: positive in group 0, negatives in group 0 and 0.
  std::vector<Example> ex = {
      {{0.0}, 1.0, 0, 0, {}}, {{0.0}, 0.0, 0, 0, {}}, {{0.0}, 0.0, 0, 0, {}}};
  const Dataset ds(Task::kRanking, Protection::discrete(2), 1, ex);
  const std::vector<double> s = {1.0, 1.0, 0.0};
  const PairwiseAccuracyMatrix m = accuracy_matrix(s, enumerate_pairs(ds, std::nullopt), 2);
  EXPECT_EQ(*m.at(0, 0), 0.5);
  EXPECT_FALSE(m.at(0, 1));
  EXPECT_FALSE(m.at(1, 0));
  EXPECT_FALSE(m.row_marginals[1]);
  EXPECT_EQ(*m.col_marginals[0], 0.5);
}

TEST(Evaluator, PerQueryAverageMatchesOracle) {
  Rng rng(103);
  const Dataset ds = random_ranking(rng, 15, 10, 2);
  const auto s = random_scores(rng, ds.size(), 3);
  const Evaluation e = Evaluator(ds, std::nullopt).evaluate(s);
  // Unweighted mean over queries where each quantity is defined.
  std::map<std::int64_t, std::vector<int>> by_q;
  for (std::size_t i = 0; i < ds.size(); ++i) by_q[*ds[i].query_id].push_back(i);
  std::vector<double> sum(4, 0), n(4, 0);
  double auc_sum = 0, auc_n = 0, row0_sum = 0, row0_n = 0;
  for (const auto& [q, idx] : by_q) {
    std::vector<double> w(4, 0), c(4, 0);
    for (int a : idx) {
      for (int b : idx) {
        if (ds[a].label > ds[b].label) {
          const int cell = *ds[a].group * 2 + *ds[b].group;
          c[cell] += 1;
          w[cell] += s[a] > s[b];
        }
      }
    }
    for (int cell = 0; cell < 4; ++cell) {
      if (c[cell] > 0) {
        sum[cell] += w[cell] / c[cell];
        n[cell] += 1;
      }
    }
    const double tc = c[0] + c[1] + c[2] + c[3];
    if (tc > 0) {
      auc_sum += (w[0] + w[1] + w[2] + w[3]) / tc;
      auc_n += 1;
    }
    if (c[0] + c[1] > 0) {
      row0_sum += (w[0] + w[1]) / (c[0] + c[1]);
      row0_n += 1;
    }
  }
  for (int cell = 0; cell < 4; ++cell) {
    if (n[cell] == 0) {
      EXPECT_FALSE(e.matrix->entries[cell]);
    } else {
      EXPECT_NEAR(*e.matrix->entries[cell], sum[cell] / n[cell], 1e-12);
    }
  }
  EXPECT_NEAR(*e.auc, auc_sum / auc_n, 1e-12);
  EXPECT_NEAR(*e.matrix->row_marginals[0], row0_sum / row0_n, 1e-12);
}

TEST(Evaluator, ContinuousAccuraciesMatchOracle) {
  Rng rng(104);
  std::vector<Example> ex;
  for (int i = 0; i < 80; ++i) {
    ex.push_back({{rng.normal()}, static_cast<double>(rng.below(3)), 0, {},
                  static_cast<double>(rng.below(4))});
  }
  const Dataset ds(Task::kRanking, Protection::continuous(), 1, ex);
  const auto s = random_scores(rng, ds.size(), 5);
  const Evaluation e = Evaluator(ds, std::nullopt).evaluate(s);
  double gw = 0, gc = 0, lw = 0, lc = 0;
  for (std::size_t a = 0; a < ds.size(); ++a) {
    for (std::size_t b = 0; b < ds.size(); ++b) {
      if (!(ds[a].label > ds[b].label)) continue;
      if (*ds[a].attribute > *ds[b].attribute) {
        gc += 1;
        gw += s[a] > s[b];
      } else if (*ds[a].attribute < *ds[b].attribute) {
        lc += 1;
        lw += s[a] > s[b];
      }
    }
  }
  EXPECT_DOUBLE_EQ(*e.continuous.greater, gw / gc);
  EXPECT_DOUBLE_EQ(*e.continuous.less, lw / lc);
  EXPECT_DOUBLE_EQ(*violation(e, Criterion::kContinuousEo), std::abs(gw / gc - lw / lc));
  EXPECT_FALSE(e.matrix);
}

TEST(Evaluator, ParityMatchesOracle) {
  Rng rng(105);
  const Dataset ds = testing::random_regression(rng, 60, 3);
  const auto s = random_scores(rng, ds.size(), 4);
  const Evaluation e = Evaluator(ds, std::nullopt).evaluate(s);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      double w = 0, n = 0;
      for (std::size_t a = 0; a < ds.size(); ++a) {
        for (std::size_t b = 0; b < ds.size(); ++b) {
          if (*ds[a].group == i && *ds[b].group == j) {
            n += 1;
            w += s[a] > s[b];
          }
        }
      }
      ASSERT_TRUE(e.parity[i * 3 + j]) << i << j;
      EXPECT_DOUBLE_EQ(*e.parity[i * 3 + j], w / n);
    }
  }
}

TEST(Evaluator, MseAndRegressionPairs) {
  Rng rng(106);
  const Dataset ds = split(testing::random_regression(rng, 100, 2), 3);
  const auto s = random_scores(rng, ds.size());
  const Evaluation e = Evaluator(ds, SplitTag::kTest).evaluate(s);
  double sq = 0, n = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.tag(i) != SplitTag::kTest) continue;
    sq += (s[i] - ds[i].label) * (s[i] - ds[i].label);
    n += 1;
  }
  EXPECT_NEAR(*e.mse, sq / n, 1e-12);
  EXPECT_THROW(Evaluator(ds, std::nullopt).evaluate(std::vector<double>(3)), DataError);
}

Evaluation matrix_eval(std::vector<double> entries, int k) {
  Evaluation e;
  e.protection = Protection::discrete(k);
  PairwiseAccuracyMatrix m;
  m.num_groups = k;
  for (double v : entries) m.entries.push_back(v);
  m.counts.assign(k * k, 1);
  for (int i = 0; i < k; ++i) {
    double r = 0, c = 0;
    for (int j = 0; j < k; ++j) {
      r += entries[i * k + j];
      c += entries[j * k + i];
    }
    m.row_marginals.push_back(r / k);
    m.col_marginals.push_back(c / k);
  }
  e.matrix = m;
  return e;
}

TEST(Violation, HandComputedValues) {
  const Evaluation e = matrix_eval({0.941, 0.980, 0.705, 0.894}, 2);
  EXPECT_NEAR(*violation(e, Criterion::kCrossGroupEo), 0.275, 1e-12);
  EXPECT_NEAR(*violation(e, Criterion::kInGroupEa), 0.047, 1e-12);
  EXPECT_NEAR(*violation(e, Criterion::kAllEntries), 0.275, 1e-12);
  EXPECT_NEAR(*violation(e, Criterion::kMarginalEo), (0.941 + 0.980 - 0.705 - 0.894) / 2, 1e-12);
  EXPECT_NEAR(*violation(e, Criterion::kSymmetricEa),
              std::abs((0.941 + 0.980) / 2 + (0.941 + 0.705) / 2 - (0.705 + 0.894) / 2 -
                       (0.980 + 0.894) / 2),
              1e-12);
  EXPECT_FALSE(violation(e, Criterion::kContinuousEo));
  EXPECT_FALSE(violation(e, Criterion::kStatisticalParity));
}

TEST(Violation, SymmetricMatrixIsZero) {
  const Evaluation e = matrix_eval({0.7, 0.6, 0.6, 0.7}, 2);
  for (Criterion c : {Criterion::kCrossGroupEo, Criterion::kInGroupEa, Criterion::kAllEntries,
                      Criterion::kMarginalEo, Criterion::kSymmetricEa}) {
    EXPECT_EQ(*violation(e, c), 0.0) << to_string(c);
  }
}

TEST(Violation, ThreeGroupsTakesMaxOverCouples) {
  const Evaluation e = matrix_eval({0.9, 0.8, 0.3, 0.5, 0.6, 0.7, 0.4, 0.65, 0.2}, 3);
  // Couples: (0,1): |0.8-0.5|, (0,2): |0.3-0.4|, (1,2): |0.7-0.65|.
  EXPECT_NEAR(*violation(e, Criterion::kCrossGroupEo), 0.3, 1e-12);
  EXPECT_NEAR(*violation(e, Criterion::kInGroupEa), 0.7, 1e-12);
}

TEST(Violation, UndefinedCellsAreSkipped) {
  Evaluation e = matrix_eval({0.9, 0.8, 0.5, 0.7}, 2);
  e.matrix->entries[1] = std::nullopt;
  EXPECT_FALSE(violation(e, Criterion::kCrossGroupEo));
  EXPECT_NEAR(*violation(e, Criterion::kAllEntries), 0.2, 1e-12);
}

TEST(Criterion, NamesAndCompatibility) {
  for (Criterion c : all_criteria()) EXPECT_EQ(parse_criterion(to_string(c)), c);
  EXPECT_THROW(parse_criterion("bogus"), ConfigError);
  EXPECT_TRUE(compatible(Criterion::kContinuousEo, Protection::continuous()));
  EXPECT_FALSE(compatible(Criterion::kContinuousEo, Protection::discrete(2)));
  EXPECT_FALSE(compatible(Criterion::kCrossGroupEo, Protection::continuous()));
  EXPECT_FALSE(compatible(Criterion::kCrossGroupEo, Protection::none()));
}

TEST(Stochastic, ExpectedIsProbabilityWeighted) {
  Rng rng(107);
  const Dataset ds = random_ranking(rng, 20, 8, 2);
  StochasticModel sm;
  sm.models = {Model(ModelSpec::linear(2), {1, 0, 0}), Model(ModelSpec::linear(2), {0, 1, 0}),
               Model(ModelSpec::linear(2), {-1, 1, 0})};
  sm.probabilities = {0.2, 0.3, 0.5};
  const Evaluator ev(ds, std::nullopt);
  const StochasticEvaluation se = evaluate_stochastic(sm, ev);
  ASSERT_EQ(se.atoms.size(), 3u);
  double auc = 0, a01 = 0;
  for (int t = 0; t < 3; ++t) {
    const Evaluation e = ev.evaluate(sm.models[t]);
    auc += sm.probabilities[t] * *e.auc;
    a01 += sm.probabilities[t] * *e.matrix->at(0, 1);
  }
  EXPECT_NEAR(*se.expected.auc, auc, 1e-12);
  EXPECT_NEAR(*se.expected.matrix->at(0, 1), a01, 1e-12);
}

}  // namespace
}  // namespace pairfair
