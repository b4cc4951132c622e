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

#include "pairfair/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "pairfair/errors.hpp"
#include "pairfair/rng.hpp"

namespace pairfair {

const char* to_string(Task task) {
  return task == Task::kRanking ? "ranking" : "regression";
}

const char* to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::kTrain:
      return "train";
    case SplitTag::kValidation:
      return "validation";
    case SplitTag::kTest:
      return "test";
  }
  return "?";
}

Task parse_task(const std::string& s) {
  if (s == "ranking") return Task::kRanking;
  if (s == "regression") return Task::kRegression;
  throw ConfigError(fmt::format("unknown task '{}'", s));
}

SplitTag parse_split_tag(const std::string& s) {
  if (s == "train") return SplitTag::kTrain;
  if (s == "validation") return SplitTag::kValidation;
  if (s == "test") return SplitTag::kTest;
  throw ConfigError(fmt::format("unknown split '{}'", s));
}

Dataset::Dataset(Task task, Protection protection, int dim,
                 std::vector<Example> examples)
    : task_(task),
      protection_(protection),
      dim_(dim),
      examples_(std::move(examples)) {
  if (dim_ < 0) throw DataError("negative dimensionality");
  if (protection_.is_discrete() && protection_.num_groups < 1) {
    throw DataError("discrete protection needs at least one group");
  }
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const Example& e = examples_[i];
    if (static_cast<int>(e.features.size()) != dim_) {
      throw DataError(fmt::format("example {}: {} features, expected {}", i,
                                  e.features.size(), dim_));
    }
    if (task_ == Task::kRanking && !e.query_id) {
      throw DataError(fmt::format("example {}: ranking example without query", i));
    }
    if (task_ == Task::kRegression && e.query_id) {
      throw DataError(fmt::format("example {}: regression example with query", i));
    }
    if (protection_.is_discrete() &&
        (!e.group || *e.group < 0 || *e.group >= protection_.num_groups)) {
      throw DataError(fmt::format("example {}: group missing or outside [0, {})",
                                  i, protection_.num_groups));
    }
    if (protection_.is_continuous() &&
        (!e.attribute || !std::isfinite(*e.attribute))) {
      throw DataError(fmt::format("example {}: missing or non-finite attribute", i));
    }
  }
}

bool Dataset::in_split(std::size_t i, std::optional<SplitTag> filter) const {
  if (!filter) return true;
  if (tags_.empty()) {
    throw DataError("dataset has not been split");
  }
  return tags_[i] == *filter;
}

std::vector<int> Dataset::indices(std::optional<SplitTag> filter) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    if (in_split(i, filter)) out.push_back(static_cast<int>(i));
  }
  return out;
}

Dataset Dataset::with_tags(std::vector<SplitTag> tags) const {
  if (tags.size() != examples_.size()) {
    throw DataError("tag count does not match example count");
  }
  Dataset out = *this;
  out.tags_ = std::move(tags);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string field = line.substr(start, comma == std::string::npos
                                               ? std::string::npos
                                               : comma - start);
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos
                      ? std::string()
                      : field.substr(first, last - first + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_real(const std::string& s, std::size_t line, const std::string& col) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    throw DataError(fmt::format("line {}: column '{}': non-numeric value '{}'",
                                line, col, s));
  }
  return v;
}

std::int64_t parse_integer(const std::string& s, std::size_t line,
                           const std::string& col) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    // Accept integral reals such as "3.0".
    const double d = parse_real(s, line, col);
    if (d != std::floor(d)) {
      throw DataError(fmt::format("line {}: column '{}': expected an integer, got '{}'",
                                  line, col, s));
    }
    return static_cast<std::int64_t>(d);
  }
  return v;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  if (schema.group_column && schema.attribute_column) {
    throw ConfigError("schema declares both a group and an attribute column");
  }
  if (schema.task == Task::kRegression && schema.query_column) {
    throw ConfigError("regression schema cannot declare a query column");
  }
  if (schema.group_column && schema.num_groups < 1) {
    throw ConfigError("group column declared without a positive group count");
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(fmt::format("'{}': missing header row", path.string()));
  }
  const std::vector<std::string> header = split_fields(line);
  auto find_column = [&](const std::string& name) -> int {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError(fmt::format("line 1: column '{}' not in header", name));
    }
    return static_cast<int>(it - header.begin());
  };

  const int label_col = find_column(schema.label_column);
  const int query_col = schema.query_column ? find_column(*schema.query_column) : -1;
  const int group_col = schema.group_column ? find_column(*schema.group_column) : -1;
  const int attr_col =
      schema.attribute_column ? find_column(*schema.attribute_column) : -1;

  std::vector<int> feature_cols;
  if (!schema.feature_columns.empty()) {
    for (const auto& name : schema.feature_columns) {
      feature_cols.push_back(find_column(name));
    }
  } else {
    for (int c = 0; c < static_cast<int>(header.size()); ++c) {
      if (c != label_col && c != query_col && c != group_col && c != attr_col) {
        feature_cols.push_back(c);
      }
    }
  }

  Protection protection = Protection::none();
  if (schema.group_column) protection = Protection::discrete(schema.num_groups);
  if (schema.attribute_column) protection = Protection::continuous();

  std::vector<Example> examples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(fmt::format("line {}: {} fields, header has {}", line_no,
                                  fields.size(), header.size()));
    }
    Example e;
    e.label = parse_real(fields[label_col], line_no, header[label_col]);
    if (query_col >= 0) {
      e.query_id = parse_integer(fields[query_col], line_no, header[query_col]);
    } else if (schema.task == Task::kRanking) {
      e.query_id = 0;
    }
    if (group_col >= 0) {
      const std::int64_t g =
          parse_integer(fields[group_col], line_no, header[group_col]);
      if (g < 0 || g >= schema.num_groups) {
        throw DataError(fmt::format("line {}: group {} outside [0, {})", line_no, g,
                                    schema.num_groups));
      }
      e.group = static_cast<int>(g);
    }
    if (attr_col >= 0) {
      e.attribute = parse_real(fields[attr_col], line_no, header[attr_col]);
      if (!std::isfinite(*e.attribute)) {
        throw DataError(fmt::format("line {}: non-finite attribute", line_no));
      }
    }
    e.features.reserve(feature_cols.size());
    for (int c : feature_cols) {
      e.features.push_back(parse_real(fields[c], line_no, header[c]));
    }
    examples.push_back(std::move(e));
  }
  return Dataset(schema.task, protection, static_cast<int>(feature_cols.size()),
                 std::move(examples));
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  const bool has_query = dataset.task() == Task::kRanking;
  const bool has_group = dataset.protection().is_discrete();
  const bool has_attr = dataset.protection().is_continuous();

  std::string row;
  if (has_query) row += "query_id,";
  row += "label";
  if (has_group) row += ",group";
  if (has_attr) row += ",attribute";
  for (int f = 0; f < dataset.dim(); ++f) row += fmt::format(",f{}", f);
  out << row << '\n';

  for (const Example& e : dataset.examples()) {
    row.clear();
    if (has_query) row += fmt::format("{},", *e.query_id);
    row += fmt::format("{:.17g}", e.label);
    if (has_group) row += fmt::format(",{}", *e.group);
    if (has_attr) row += fmt::format(",{:.17g}", *e.attribute);
    for (double x : e.features) row += fmt::format(",{:.17g}", x);
    out << row << '\n';
  }
  if (!out) throw DataError(fmt::format("write to '{}' failed", path.string()));
}

// ---------------------------------------------------------------------------
// Splitting

Dataset split(const Dataset& dataset, std::uint64_t seed) {
  if (dataset.empty()) throw DataError("cannot split an empty dataset");

  std::vector<std::int64_t> query_ids;
  if (dataset.task() == Task::kRanking) {
    for (const Example& e : dataset.examples()) query_ids.push_back(*e.query_id);
    std::sort(query_ids.begin(), query_ids.end());
    query_ids.erase(std::unique(query_ids.begin(), query_ids.end()),
                    query_ids.end());
  }
  const bool by_query = query_ids.size() > 1;

  // Units are sorted query ids (or example indices) so the assignment does
  // not depend on row order.
  std::vector<std::int64_t> units;
  if (by_query) {
    units = query_ids;
  } else {
    units.resize(dataset.size());
    std::iota(units.begin(), units.end(), 0);
  }
  if (units.size() < 4) {
    throw DataError(fmt::format(
        "need at least 4 {} to split three ways, have {}",
        by_query ? "queries" : "examples", units.size()));
  }
  Rng rng(seed);
  rng.shuffle(units);

  const std::size_t n = units.size();
  const std::size_t n_train = n / 2;
  const std::size_t n_val = n / 4;
  std::map<std::int64_t, SplitTag> unit_tag;
  for (std::size_t r = 0; r < n; ++r) {
    unit_tag[units[r]] = r < n_train           ? SplitTag::kTrain
                         : r < n_train + n_val ? SplitTag::kValidation
                                               : SplitTag::kTest;
  }

  std::vector<SplitTag> tags(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    tags[i] = by_query ? unit_tag.at(*dataset[i].query_id)
                       : unit_tag.at(static_cast<std::int64_t>(i));
  }
  return dataset.with_tags(std::move(tags));
}

// ---------------------------------------------------------------------------
// Pairs

int num_cells_for(const Protection& protection) {
  switch (protection.kind) {
    case Protection::Kind::kDiscrete:
      return protection.num_groups * protection.num_groups;
    case Protection::Kind::kContinuous:
      return 3;
    case Protection::Kind::kNone:
      return 1;
  }
  return 1;
}

PairSet::PairSet(PairMode mode, Protection protection, std::vector<Pair> pairs,
                 std::vector<QueryBlock> blocks)
    : mode_(mode),
      protection_(protection),
      pairs_(std::move(pairs)),
      cells_(num_cells_for(protection)),
      blocks_(std::move(blocks)) {
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const int c = pairs_[p].cell;
    if (c < 0 || c >= num_cells()) throw DataError("pair cell out of range");
    cells_[c].push_back(static_cast<int>(p));
  }
}

PairSet PairSet::block(std::size_t b) const {
  const QueryBlock& qb = blocks_.at(b);
  std::vector<Pair> sub(pairs_.begin() + qb.begin, pairs_.begin() + qb.end);
  QueryBlock whole{qb.query_id, 0, sub.size()};
  return PairSet(mode_, protection_, std::move(sub), {whole});
}

namespace {

int supervised_cell(const Dataset& ds, int better, int worse) {
  const Protection& pr = ds.protection();
  if (pr.is_discrete()) {
    return discrete_cell(*ds[better].group, *ds[worse].group, pr.num_groups);
  }
  if (pr.is_continuous()) {
    const double zb = *ds[better].attribute;
    const double zw = *ds[worse].attribute;
    return zb > zw ? kCellGreater : zb < zw ? kCellLess : kCellTied;
  }
  return 0;
}

// Split-filtered example indices grouped by query id, queries ascending,
// examples in file order.
std::vector<std::pair<std::int64_t, std::vector<int>>> group_by_query(
    const Dataset& ds, std::optional<SplitTag> split) {
  std::map<std::int64_t, std::vector<int>> by_query;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.in_split(i, split)) {
      by_query[*ds[i].query_id].push_back(static_cast<int>(i));
    }
  }
  return {by_query.begin(), by_query.end()};
}

}  // namespace

PairSet enumerate_ranking_pairs(const Dataset& dataset,
                                std::optional<SplitTag> split) {
  if (dataset.task() != Task::kRanking) {
    throw DataError("ranking pairs requested for a regression dataset");
  }
  std::vector<Pair> pairs;
  std::vector<QueryBlock> blocks;
  for (const auto& [qid, members] : group_by_query(dataset, split)) {
    const std::size_t begin = pairs.size();
    for (int a : members) {
      for (int b : members) {
        if (dataset[a].label > dataset[b].label) {
          pairs.push_back({a, b, supervised_cell(dataset, a, b)});
        }
      }
    }
    blocks.push_back({qid, begin, pairs.size()});
  }
  return PairSet(PairMode::kSupervised, dataset.protection(), std::move(pairs),
                 std::move(blocks));
}

PairSet enumerate_regression_pairs(const Dataset& dataset,
                                   std::optional<SplitTag> split,
                                   std::optional<std::size_t> max_pairs,
                                   std::uint64_t seed) {
  if (dataset.task() != Task::kRegression) {
    throw DataError("regression pairs requested for a ranking dataset");
  }
  const std::vector<int> members = dataset.indices(split);

  // Members sorted by label ascending; for the member at sorted position r,
  // the examples with strictly smaller labels are sorted[0, below[r]).
  std::vector<int> sorted = members;
  std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) {
    return dataset[a].label < dataset[b].label;
  });
  std::vector<std::uint64_t> below(sorted.size());
  for (std::size_t r = 0, first_equal = 0; r < sorted.size(); ++r) {
    if (r > 0 && dataset[sorted[r]].label != dataset[sorted[r - 1]].label) {
      first_equal = r;
    }
    below[r] = first_equal;
  }
  std::vector<std::uint64_t> prefix(sorted.size() + 1, 0);
  for (std::size_t r = 0; r < sorted.size(); ++r) prefix[r + 1] = prefix[r] + below[r];
  const std::uint64_t total = prefix.back();

  std::vector<Pair> pairs;
  if (!max_pairs || *max_pairs >= total) {
    pairs.reserve(total);
    for (int a : members) {
      for (int b : members) {
        if (dataset[a].label > dataset[b].label) {
          pairs.push_back({a, b, supervised_cell(dataset, a, b)});
        }
      }
    }
  } else {
    // Floyd's algorithm: exactly max_pairs distinct indices in [0, total).
    Rng rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(*max_pairs * 2);
    for (std::uint64_t j = total - *max_pairs; j < total; ++j) {
      const std::uint64_t t = rng.below(j + 1);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::uint64_t> picks(chosen.begin(), chosen.end());
    std::sort(picks.begin(), picks.end());
    pairs.reserve(picks.size());
    for (std::uint64_t k : picks) {
      const auto it = std::upper_bound(prefix.begin(), prefix.end(), k);
      const std::size_t r = static_cast<std::size_t>(it - prefix.begin()) - 1;
      const int a = sorted[r];
      const int b = sorted[k - prefix[r]];
      pairs.push_back({a, b, supervised_cell(dataset, a, b)});
    }
  }
  std::vector<QueryBlock> blocks{{0, 0, pairs.size()}};
  return PairSet(PairMode::kSupervised, dataset.protection(), std::move(pairs),
                 std::move(blocks));
}

PairSet enumerate_pairs(const Dataset& dataset, std::optional<SplitTag> split,
                        std::optional<std::size_t> max_pairs, std::uint64_t seed) {
  return dataset.task() == Task::kRanking
             ? enumerate_ranking_pairs(dataset, split)
             : enumerate_regression_pairs(dataset, split, max_pairs, seed);
}

PairSet enumerate_parity_pairs(const Dataset& dataset,
                               std::optional<SplitTag> split) {
  const Protection& pr = dataset.protection();
  if (!pr.is_discrete()) {
    throw DataError("parity pairs need discrete groups");
  }
  std::vector<std::pair<std::int64_t, std::vector<int>>> units;
  if (dataset.task() == Task::kRanking) {
    units = group_by_query(dataset, split);
  } else {
    units.push_back({0, dataset.indices(split)});
  }
  std::vector<Pair> pairs;
  std::vector<QueryBlock> blocks;
  for (const auto& [qid, members] : units) {
    const std::size_t begin = pairs.size();
    for (std::size_t x = 0; x < members.size(); ++x) {
      for (std::size_t y = x + 1; y < members.size(); ++y) {
        int a = members[x];
        int b = members[y];
        int ga = *dataset[a].group;
        int gb = *dataset[b].group;
        if (ga == gb) continue;
        if (ga > gb) {
          std::swap(a, b);
          std::swap(ga, gb);
        }
        pairs.push_back({a, b, discrete_cell(ga, gb, pr.num_groups)});
      }
    }
    blocks.push_back({qid, begin, pairs.size()});
  }
  return PairSet(PairMode::kParity, pr, std::move(pairs), std::move(blocks));
}

}  // namespace pairfair
