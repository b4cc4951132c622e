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

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "pairfair/dataset.hpp"
#include "pairfair/errors.hpp"
#include "support.hpp"

namespace pairfair {
namespace {

using testing::random_ranking;
using testing::random_regression;
using testing::temp_dir;

std::filesystem::path write_text(const std::string& name, const std::string& text) {
  const auto path = temp_dir("dataset_" + name) / "data.csv";
  std::ofstream(path) << text;
  return path;
}

CsvSchema ranking_schema() {
  CsvSchema s;
  s.query_column = "qid";
  s.group_column = "g";
  s.num_groups = 2;
  return s;
}

TEST(LoadCsv, BindsDeclaredColumns) {
  const auto path = write_text("binds", "x1,qid,label,g,x2\n0.5,7,1,0,2\n-1,7,0,1,3\n");
  const Dataset ds = load_csv(path, ranking_schema());
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.dim(), 2);
  EXPECT_EQ(ds[0].features, (std::vector<double>{0.5, 2.0}));
  EXPECT_EQ(*ds[1].query_id, 7);
  EXPECT_EQ(*ds[1].group, 1);
  EXPECT_EQ(ds[1].label, 0.0);
  EXPECT_EQ(ds.protection(), Protection::discrete(2));
}

TEST(LoadCsv, ExplicitFeatureColumnsKeepDeclaredOrder) {
  const auto path = write_text("order", "a,b,label,c\n1,2,0,3\n");
  CsvSchema s;
  s.task = Task::kRegression;
  s.feature_columns = {"c", "a"};
  const Dataset ds = load_csv(path, s);
  EXPECT_EQ(ds[0].features, (std::vector<double>{3.0, 1.0}));
}

TEST(LoadCsv, ErrorsCarryLineNumbers) {
  const auto bad_value = write_text("badvalue", "qid,label,g,x\n1,1,0,2\n1,oops,0,2\n");
  try {
    load_csv(bad_value, ranking_schema());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  const auto short_row = write_text("short", "qid,label,g,x\n1,1,0\n");
  EXPECT_THROW(load_csv(short_row, ranking_schema()), DataError);
  const auto bad_group = write_text("group", "qid,label,g,x\n1,1,2,0\n");
  EXPECT_THROW(load_csv(bad_group, ranking_schema()), DataError);
  const auto missing = write_text("missing", "qid,label,x\n1,1,0\n");
  EXPECT_THROW(load_csv(missing, ranking_schema()), DataError);
  EXPECT_THROW(load_csv("/nonexistent/file.csv", ranking_schema()), DataError);
}

TEST(LoadCsv, RankingWithoutQueryColumnIsOneQuery) {
  const auto path = write_text("noquery", "label,z,x\n1,0.5,1\n0,0.25,2\n");
  CsvSchema s;
  s.attribute_column = "z";
  const Dataset ds = load_csv(path, s);
  EXPECT_EQ(*ds[0].query_id, 0);
  EXPECT_EQ(*ds[1].query_id, 0);
  EXPECT_TRUE(ds.protection().is_continuous());
  EXPECT_EQ(*ds[1].attribute, 0.25);
}

TEST(LoadCsv, WriteThenLoadIsExact) {
  Rng rng(3);
  const Dataset ds = random_ranking(rng, 20, 6, 3, 4);
  const auto path = temp_dir("roundtrip") / "d.csv";
  write_csv(ds, path);
  CsvSchema s;
  s.query_column = "query_id";
  s.group_column = "group";
  s.num_groups = 3;
  EXPECT_EQ(load_csv(path, s), ds);
}

TEST(Dataset, ValidatesExamples) {
  Example e;
  e.features = {1.0};
  e.label = 1.0;
  EXPECT_THROW(Dataset(Task::kRanking, Protection::none(), 1, {e}), DataError);
  e.query_id = 1;
  EXPECT_THROW(Dataset(Task::kRanking, Protection::none(), 2, {e}), DataError);
  EXPECT_THROW(Dataset(Task::kRanking, Protection::discrete(2), 1, {e}), DataError);
  EXPECT_NO_THROW(Dataset(Task::kRanking, Protection::none(), 1, {e}));
}

TEST(Split, ProportionsAndDeterminism) {
  Rng rng(5);
  const Dataset ds = random_regression(rng, 103, 0);
  const Dataset a = split(ds, 11);
  EXPECT_EQ(a, split(ds, 11));
  EXPECT_NE(a.tags(), split(ds, 12).tags());
  std::map<SplitTag, int> n;
  for (SplitTag t : a.tags()) ++n[t];
  EXPECT_EQ(n[SplitTag::kTrain], 51);
  EXPECT_EQ(n[SplitTag::kValidation], 25);
  EXPECT_EQ(n[SplitTag::kTest], 27);
}

TEST(Split, KeepsQueriesTogether) {
  Rng rng(8);
  const Dataset ds = split(random_ranking(rng, 40, 5, 2), 1);
  std::map<std::int64_t, std::set<SplitTag>> seen;
  for (std::size_t i = 0; i < ds.size(); ++i) seen[*ds[i].query_id].insert(ds.tag(i));
  int train = 0;
  for (const auto& [q, tags] : seen) {
    EXPECT_EQ(tags.size(), 1u) << "query " << q;
    train += *tags.begin() == SplitTag::kTrain;
  }
  EXPECT_EQ(train, 20);
}

TEST(Split, NeedsFourUnits) {
  Rng rng(1);
  EXPECT_THROW(split(random_regression(rng, 3, 0), 0), DataError);
  EXPECT_NO_THROW(split(random_regression(rng, 4, 0), 0));
}

TEST(Split, FilterOnUnsplitDatasetThrows) {
  Rng rng(1);
  const Dataset ds = random_regression(rng, 10, 0);
  EXPECT_THROW(ds.indices(SplitTag::kTrain), DataError);
  EXPECT_EQ(ds.indices(std::nullopt).size(), 10u);
}

// Oracle: every ordered (a, b) in the same query with y_a > y_b, with the
// cell computed from the raw groups.
std::multiset<std::tuple<int, int, int>> ranking_oracle(const Dataset& ds) {
  std::multiset<std::tuple<int, int, int>> out;
  const int k = ds.protection().num_groups;
  for (std::size_t a = 0; a < ds.size(); ++a) {
    for (std::size_t b = 0; b < ds.size(); ++b) {
      if (*ds[a].query_id == *ds[b].query_id && ds[a].label > ds[b].label) {
        out.insert({static_cast<int>(a), static_cast<int>(b), *ds[a].group * k + *ds[b].group});
      }
    }
  }
  return out;
}

TEST(RankingPairs, MatchOracle) {
  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset ds = random_ranking(rng, 8, 7, 3);
    const PairSet ps = enumerate_ranking_pairs(ds, std::nullopt);
    std::multiset<std::tuple<int, int, int>> got;
    for (const Pair& p : ps.pairs()) got.insert({p.better, p.worse, p.cell});
    EXPECT_EQ(got, ranking_oracle(ds));
    // Blocks tile the pair list, one per query, each pair inside its query.
    std::size_t pos = 0;
    for (const QueryBlock& b : ps.blocks()) {
      EXPECT_EQ(b.begin, pos);
      for (std::size_t p = b.begin; p < b.end; ++p) {
        EXPECT_EQ(*ds[ps[p].better].query_id, b.query_id);
      }
      pos = b.end;
    }
    EXPECT_EQ(pos, ps.size());
    // Cell index lists partition the pairs.
    std::size_t total = 0;
    for (int c = 0; c < ps.num_cells(); ++c) {
      for (int p : ps.cell(c)) EXPECT_EQ(ps[p].cell, c);
      total += ps.cell(c).size();
    }
    EXPECT_EQ(total, ps.size());
  }
}

TEST(RankingPairs, SplitFilterRestrictsBothMembers) {
  Rng rng(4);
  const Dataset ds = split(random_ranking(rng, 30, 6, 2), 2);
  const PairSet ps = enumerate_ranking_pairs(ds, SplitTag::kValidation);
  for (const Pair& p : ps.pairs()) {
    EXPECT_EQ(ds.tag(p.better), SplitTag::kValidation);
    EXPECT_EQ(ds.tag(p.worse), SplitTag::kValidation);
  }
}

TEST(ContinuousPairs, CellsUseAttributeOrder) {
  Rng rng(6);
  const Dataset ds = testing::random_continuous_ranking(rng, 10, 6);
  const PairSet ps = enumerate_ranking_pairs(ds, std::nullopt);
  EXPECT_EQ(ps.num_cells(), 3);
  for (const Pair& p : ps.pairs()) {
    const double zb = *ds[p.better].attribute;
    const double zw = *ds[p.worse].attribute;
    const int want = zb > zw ? kCellGreater : zb < zw ? kCellLess : kCellTied;
    EXPECT_EQ(p.cell, want);
  }
}

TEST(RegressionPairs, FullEnumerationMatchesOracle) {
  Rng rng(9);
  const Dataset ds = random_regression(rng, 40, 2);
  const PairSet ps = enumerate_regression_pairs(ds, std::nullopt, std::nullopt, 0);
  std::size_t want = 0;
  for (std::size_t a = 0; a < ds.size(); ++a) {
    for (std::size_t b = 0; b < ds.size(); ++b) want += ds[a].label > ds[b].label;
  }
  EXPECT_EQ(ps.size(), want);
  ASSERT_EQ(ps.blocks().size(), 1u);
}

TEST(RegressionPairs, SubsampleIsExactDistinctAndValid) {
  Rng rng(10);
  const Dataset ds = random_regression(rng, 60, 2);
  const PairSet full = enumerate_regression_pairs(ds, std::nullopt, std::nullopt, 0);
  const PairSet sub = enumerate_regression_pairs(ds, std::nullopt, 300, 77);
  ASSERT_EQ(sub.size(), 300u);
  std::set<std::pair<int, int>> seen;
  for (const Pair& p : sub.pairs()) {
    EXPECT_GT(ds[p.better].label, ds[p.worse].label);
    EXPECT_TRUE(seen.insert({p.better, p.worse}).second);
    EXPECT_EQ(p.cell, *ds[p.better].group * 2 + *ds[p.worse].group);
  }
  EXPECT_EQ(enumerate_regression_pairs(ds, std::nullopt, 300, 77).pairs(), sub.pairs());
  // Asking for more than exist returns everything.
  EXPECT_EQ(enumerate_regression_pairs(ds, std::nullopt, full.size() + 5, 1).size(),
            full.size());
}

TEST(RegressionPairs, SubsampleIsRoughlyUniform) {
  // 6 examples with distinct labels: 15 valid pairs, sample 5 per draw.
  std::vector<Example> ex;
  for (int i = 0; i < 6; ++i) ex.push_back({{0.0}, static_cast<double>(i), {}, {}, {}});
  const Dataset ds(Task::kRegression, Protection::none(), 1, ex);
  std::map<std::pair<int, int>, int> hits;
  const int draws = 3000;
  for (int s = 0; s < draws; ++s) {
    const PairSet ps = enumerate_regression_pairs(ds, std::nullopt, 5, s);
    for (const Pair& p : ps.pairs()) {
      ++hits[{p.better, p.worse}];
    }
  }
  ASSERT_EQ(hits.size(), 15u);
  // Each pair is included with probability 1/3; binomial sd is about 26.
  for (const auto& [pair, n] : hits) EXPECT_NEAR(n, draws / 3.0, 130.0);
}

TEST(ParityPairs, OnePerCrossGroupCoupleLowerGroupFirst) {
  Rng rng(12);
  const Dataset ds = random_ranking(rng, 10, 6, 3);
  const PairSet ps = enumerate_parity_pairs(ds, std::nullopt);
  std::size_t want = 0;
  for (std::size_t a = 0; a < ds.size(); ++a) {
    for (std::size_t b = a + 1; b < ds.size(); ++b) {
      want += *ds[a].query_id == *ds[b].query_id && *ds[a].group != *ds[b].group;
    }
  }
  EXPECT_EQ(ps.size(), want);
  for (const Pair& p : ps.pairs()) {
    EXPECT_LT(*ds[p.better].group, *ds[p.worse].group);
    EXPECT_EQ(*ds[p.better].query_id, *ds[p.worse].query_id);
  }
  EXPECT_EQ(ps.mode(), PairMode::kParity);
}

TEST(PairSet, BlockIsStandalone) {
  Rng rng(13);
  const Dataset ds = random_ranking(rng, 5, 6, 2);
  const PairSet ps = enumerate_ranking_pairs(ds, std::nullopt);
  for (std::size_t b = 0; b < ps.blocks().size(); ++b) {
    const PairSet one = ps.block(b);
    const QueryBlock& qb = ps.blocks()[b];
    ASSERT_EQ(one.size(), qb.end - qb.begin);
    for (std::size_t p = 0; p < one.size(); ++p) EXPECT_EQ(one[p], ps[qb.begin + p]);
    EXPECT_EQ(one.num_cells(), ps.num_cells());
  }
}

}  // namespace
}  // namespace pairfair
