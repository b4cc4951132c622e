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

#ifndef PAIRFAIR_TESTS_SUPPORT_HPP_
#define PAIRFAIR_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pairfair/dataset.hpp"
#include "pairfair/rng.hpp"

namespace pairfair::testing {

// Small ranking dataset: `queries` queries of up to `per_query` candidates,
// integer labels in [0, levels), discrete groups when k > 0.
inline Dataset random_ranking(Rng& rng, int queries, int per_query, int k, int dim = 2,
                              int levels = 3) {
  std::vector<Example> ex;
  for (int q = 0; q < queries; ++q) {
    const int n = 1 + static_cast<int>(rng.below(per_query));
    for (int c = 0; c < n; ++c) {
      Example e;
      for (int d = 0; d < dim; ++d) e.features.push_back(rng.normal());
      e.label = static_cast<double>(rng.below(levels));
      e.query_id = q;
      if (k > 0) e.group = static_cast<int>(rng.below(k));
      ex.push_back(e);
    }
  }
  return Dataset(Task::kRanking, k > 0 ? Protection::discrete(k) : Protection::none(), dim,
                 std::move(ex));
}

inline Dataset random_continuous_ranking(Rng& rng, int queries, int per_query, int dim = 2) {
  std::vector<Example> ex;
  for (int q = 0; q < queries; ++q) {
    const int n = 1 + static_cast<int>(rng.below(per_query));
    for (int c = 0; c < n; ++c) {
      Example e;
      for (int d = 0; d < dim; ++d) e.features.push_back(rng.normal());
      e.label = static_cast<double>(rng.below(3));
      e.query_id = q;
      // Coarse attribute so ties occur.
      e.attribute = static_cast<double>(rng.below(4));
      ex.push_back(e);
    }
  }
  return Dataset(Task::kRanking, Protection::continuous(), dim, std::move(ex));
}

inline Dataset random_regression(Rng& rng, int n, int k, int dim = 2) {
  std::vector<Example> ex;
  for (int i = 0; i < n; ++i) {
    Example e;
    for (int d = 0; d < dim; ++d) e.features.push_back(rng.normal());
    e.label = static_cast<double>(rng.below(6)) * 0.5;
    if (k > 0) e.group = static_cast<int>(rng.below(k));
    ex.push_back(e);
  }
  return Dataset(Task::kRegression, k > 0 ? Protection::discrete(k) : Protection::none(),
                 dim, std::move(ex));
}

inline std::vector<double> random_scores(Rng& rng, std::size_t n, int levels = 0) {
  std::vector<double> s(n);
  for (auto& v : s) v = levels > 0 ? static_cast<double>(rng.below(levels)) : rng.normal();
  return s;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pairfair_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace pairfair::testing

#endif  // PAIRFAIR_TESTS_SUPPORT_HPP_
