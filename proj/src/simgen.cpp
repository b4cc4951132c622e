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

#include "pairfair/simgen.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "pairfair/errors.hpp"
#include "pairfair/rng.hpp"

namespace pairfair::simgen {

GaussianSpec feature_distribution(int y, int z) {
  const bool pos = y > 0;
  switch (z) {
    case 0:
      return pos ? GaussianSpec{{1.0, 0.0}, 1.0} : GaussianSpec{{-1.0, 1.0}, 1.0};
    case 1:
      return pos ? GaussianSpec{{-1.5, 0.75}, 0.5}
                 : GaussianSpec{{-2.0, -1.0}, 1.0};
    case 2:
      return pos ? GaussianSpec{{1.5, 0.5}, 1.0} : GaussianSpec{{-1.0, 1.0}, 1.0};
    default:
      throw DataError(fmt::format("no feature distribution for group {}", z));
  }
}

namespace {

template <typename GroupSampler>
Dataset generate_queries(int n_queries, std::uint64_t seed, int num_groups,
                         GroupSampler&& sample_group) {
  if (n_queries < 1) throw ConfigError("n_queries must be at least 1");
  Rng rng(seed);
  std::vector<Example> examples;
  examples.reserve(static_cast<std::size_t>(n_queries) * kCandidatesPerQuery);
  for (int q = 0; q < n_queries; ++q) {
    const auto positive = static_cast<int>(rng.below(kCandidatesPerQuery));
    for (int c = 0; c < kCandidatesPerQuery; ++c) {
      const int y = c == positive ? 1 : -1;
      const int z = sample_group(rng);
      const GaussianSpec g = feature_distribution(y, z);
      const double sd = std::sqrt(g.variance);
      Example e;
      e.label = y;
      e.query_id = q;
      e.group = z;
      e.features = {g.mean[0] + sd * rng.normal(), g.mean[1] + sd * rng.normal()};
      examples.push_back(std::move(e));
    }
  }
  return Dataset(Task::kRanking, Protection::discrete(num_groups), 2,
                 std::move(examples));
}

}  // namespace

Dataset generate_two_group(int n_queries, std::uint64_t seed) {
  return generate_queries(n_queries, seed, 2,
                          [](Rng& rng) { return rng.bernoulli(0.1) ? 1 : 0; });
}

Dataset generate_three_group(int n_queries, std::uint64_t seed) {
  return generate_queries(n_queries, seed, 3, [](Rng& rng) {
    const double u = rng.uniform();
    return u < 0.45 ? 0 : u < 0.55 ? 1 : 2;
  });
}

Dataset generate(const std::string& name, int n_queries, std::uint64_t seed) {
  if (name == "two_group") return generate_two_group(n_queries, seed);
  if (name == "three_group") return generate_three_group(n_queries, seed);
  throw ConfigError(fmt::format("unknown generator '{}'", name));
}

}  // namespace pairfair::simgen
