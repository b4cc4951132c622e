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

#ifndef PAIRFAIR_SIMGEN_HPP_
#define PAIRFAIR_SIMGEN_HPP_

#include <array>
#include <cstdint>
#include <string>

#include "pairfair/dataset.hpp"

namespace pairfair::simgen {

inline constexpr int kCandidatesPerQuery = 11;

// Isotropic 2-D Gaussian: every covariance used by the generators is a
// multiple of the identity, so sampling is componentwise.
struct GaussianSpec {
  std::array<double, 2> mean{};
  double variance = 1.0;
};

// Class-conditional feature distribution for label y in {-1, +1}, group z.
GaussianSpec feature_distribution(int y, int z);

// 11 candidates per query, one positive (y=+1) chosen uniformly, the rest
// y=-1; z ~ Bernoulli(0.1).
Dataset generate_two_group(int n_queries, std::uint64_t seed);

// Same structure with z in {0, 1, 2} drawn with probabilities
// (0.45, 0.10, 0.45).
Dataset generate_three_group(int n_queries, std::uint64_t seed);

// Dispatch by name ("two_group" / "three_group").
Dataset generate(const std::string& name, int n_queries, std::uint64_t seed);

}  // namespace pairfair::simgen

#endif  // PAIRFAIR_SIMGEN_HPP_
