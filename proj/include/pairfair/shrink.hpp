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

#ifndef PAIRFAIR_SHRINK_HPP_
#define PAIRFAIR_SHRINK_HPP_

#include <span>
#include <vector>

namespace pairfair {

// Dense linear program
//   maximize c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0
// solved by the two-phase tableau simplex with Bland's pivoting rule, which
// returns a basic (vertex) solution.
struct LinearProgram {
  std::vector<double> objective;             // c, length n
  std::vector<std::vector<double>> a_ub;     // rows of length n
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double value = 0.0;
};

LpSolution solve_lp(const LinearProgram& lp);

struct ShrinkResult {
  bool feasible = false;
  std::vector<double> probabilities;  // one per snapshot, sparse
  double objective = 0.0;
};

// Best mixture of snapshots: maximize sum_t p_t * objective[t] subject to
// sum_t p_t * constraints[c][t] <= bounds[c] for every c and p on the
// simplex. A basic solution has at most (#constraints + 1) nonzero p_t.
ShrinkResult shrink(std::span<const double> objective,
                    const std::vector<std::vector<double>>& constraints,
                    std::span<const double> bounds);

// Robust variant: maximize sum_g min_{c in g} sum_t p_t * terms[c][t].
// `group_of[c]` names the group of term c. Terms are accuracies, so the
// auxiliary per-group minima are taken as nonnegative. Support is at most
// (#terms + 1).
ShrinkResult shrink_robust(const std::vector<std::vector<double>>& terms,
                           std::span<const int> group_of, int num_groups);

}  // namespace pairfair

#endif  // PAIRFAIR_SHRINK_HPP_
