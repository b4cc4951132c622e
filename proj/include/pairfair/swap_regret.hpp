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

#ifndef PAIRFAIR_SWAP_REGRET_HPP_
#define PAIRFAIR_SWAP_REGRET_HPP_

#include <span>
#include <vector>

#include "pairfair/surrogate.hpp"

namespace pairfair {

// Fixed point of a column-stochastic n x n matrix (row major) by power
// iteration from the uniform vector: ||M l - l||_1 <= 1e-8, sum l = 1,
// l >= 0. Switches to the lazy chain (M + I) / 2, which has the same fixed
// points, if plain iteration is slow to settle. After 10^4 iterations a
// direct solve is tried before throwing NumericalError.
std::vector<double> stationary_distribution(std::span<const double> matrix,
                                            std::size_t n);

// Initial state for m constraints: every column puts `objective_weight` on
// the objective coordinate and spreads the rest evenly, so the initial lambda
// equals that column.
LambdaState initial_lambda_state(std::size_t num_constraints,
                                 double objective_weight = 0.5);

// Exponentiated-gradient step on the swap-regret matrix:
//   M_ij <- M_ij * exp(eta * g_i * lambda_j), then each column renormalized,
// and lambda <- stationary_distribution(M). `gradient` is the lambda-player's
// payoff gradient (see lagrangian_lambda).
LambdaState swap_regret_update(const LambdaState& state,
                               std::span<const double> gradient, double eta);

}  // namespace pairfair

#endif  // PAIRFAIR_SWAP_REGRET_HPP_
