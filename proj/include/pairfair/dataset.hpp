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

#ifndef PAIRFAIR_DATASET_HPP_
#define PAIRFAIR_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pairfair {

enum class Task { kRanking, kRegression };

enum class SplitTag : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };

const char* to_string(Task task);
const char* to_string(SplitTag tag);
Task parse_task(const std::string& s);
SplitTag parse_split_tag(const std::string& s);

// Which protected information a dataset carries.
struct Protection {
  enum class Kind { kNone, kDiscrete, kContinuous };
  Kind kind = Kind::kNone;
  int num_groups = 0;  // K, only meaningful for kDiscrete

  static Protection none() { return {}; }
  static Protection discrete(int k) { return {Kind::kDiscrete, k}; }
  static Protection continuous() { return {Kind::kContinuous, 0}; }

  bool is_discrete() const { return kind == Kind::kDiscrete; }
  bool is_continuous() const { return kind == Kind::kContinuous; }
  bool operator==(const Protection&) const = default;
};

struct Example {
  std::vector<double> features;
  double label = 0.0;
  std::optional<std::int64_t> query_id;
  std::optional<int> group;
  std::optional<double> attribute;

  bool operator==(const Example&) const = default;
};

// An immutable collection of examples plus an optional train/validation/test
// assignment. Validation happens in the constructor.
class Dataset {
 public:
  Dataset(Task task, Protection protection, int dim,
          std::vector<Example> examples);

  Task task() const { return task_; }
  const Protection& protection() const { return protection_; }
  int dim() const { return dim_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  const Example& operator[](std::size_t i) const { return examples_[i]; }
  const std::vector<Example>& examples() const { return examples_; }

  bool has_split() const { return !tags_.empty(); }
  SplitTag tag(std::size_t i) const { return tags_[i]; }
  const std::vector<SplitTag>& tags() const { return tags_; }

  // True when example i is selected by `filter` (nullopt selects everything).
  bool in_split(std::size_t i, std::optional<SplitTag> filter) const;
  std::vector<int> indices(std::optional<SplitTag> filter) const;

  // Returns a copy carrying the given tags (one per example).
  Dataset with_tags(std::vector<SplitTag> tags) const;

  bool operator==(const Dataset&) const = default;

 private:
  Task task_;
  Protection protection_;
  int dim_;
  std::vector<Example> examples_;
  std::vector<SplitTag> tags_;
};

// Column binding for CSV ingestion. Nothing is inferred beyond "every column
// not bound to a role is a feature" when `feature_columns` is empty.
struct CsvSchema {
  Task task = Task::kRanking;
  std::string label_column = "label";
  std::optional<std::string> query_column;
  std::optional<std::string> group_column;
  std::optional<std::string> attribute_column;
  std::vector<std::string> feature_columns;
  int num_groups = 0;
};

// Rows are returned in file order. A ranking schema without a query column
// puts every row in query 0. Errors are reported as DataError with the
// 1-based line number.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

// Writes `query_id,label,group,attribute,f0..f{d-1}`, emitting only the role
// columns the dataset uses. Values are printed with 17 significant digits.
void write_csv(const Dataset& dataset, const std::filesystem::path& path);

// Seeded 1/2 : 1/4 : 1/4 split. Ranking datasets with more than one query are
// split by query; otherwise by example.
Dataset split(const Dataset& dataset, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pairs

// Cell numbering. Discrete protection: cell = i * K + j. Continuous: the tags
// below. No protection: cell 0 for everything.
inline constexpr int kCellGreater = 0;
inline constexpr int kCellLess = 1;
inline constexpr int kCellTied = 2;

inline int discrete_cell(int i, int j, int k) { return i * k + j; }

struct Pair {
  int better = 0;  // example index; the G_i member for parity pairs
  int worse = 0;
  int cell = 0;
  bool operator==(const Pair&) const = default;
};

enum class PairMode { kSupervised, kParity };

// Contiguous range of pairs that share a query.
struct QueryBlock {
  std::int64_t query_id = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

class PairSet {
 public:
  PairSet(PairMode mode, Protection protection, std::vector<Pair> pairs,
          std::vector<QueryBlock> blocks);

  PairMode mode() const { return mode_; }
  const Protection& protection() const { return protection_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const Pair& operator[](std::size_t i) const { return pairs_[i]; }
  const std::vector<Pair>& pairs() const { return pairs_; }

  int num_cells() const { return static_cast<int>(cells_.size()); }
  // Pair indices belonging to `cell`.
  const std::vector<int>& cell(int c) const { return cells_[c]; }
  const std::vector<QueryBlock>& blocks() const { return blocks_; }

  // Pairs of one query block as a standalone set.
  PairSet block(std::size_t b) const;

 private:
  PairMode mode_;
  Protection protection_;
  std::vector<Pair> pairs_;
  std::vector<std::vector<int>> cells_;
  std::vector<QueryBlock> blocks_;
};

int num_cells_for(const Protection& protection);

PairSet enumerate_ranking_pairs(const Dataset& dataset,
                                std::optional<SplitTag> split);

// All ordered pairs with y > y' when `max_pairs` is absent; otherwise a
// uniform sample of exactly min(max_pairs, total) distinct such pairs, drawn
// without materializing the full pair list.
PairSet enumerate_regression_pairs(const Dataset& dataset,
                                   std::optional<SplitTag> split,
                                   std::optional<std::size_t> max_pairs,
                                   std::uint64_t seed);

// Supervised pairs for either task.
PairSet enumerate_pairs(const Dataset& dataset, std::optional<SplitTag> split,
                        std::optional<std::size_t> max_pairs = std::nullopt,
                        std::uint64_t seed = 0);

// One pair per unordered cross-group couple, lower group id first. Ranking
// datasets only pair candidates of the same query.
PairSet enumerate_parity_pairs(const Dataset& dataset,
                               std::optional<SplitTag> split);

}  // namespace pairfair

#endif  // PAIRFAIR_DATASET_HPP_
