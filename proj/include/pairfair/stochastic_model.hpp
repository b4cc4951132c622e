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

#ifndef PAIRFAIR_STOCHASTIC_MODEL_HPP_
#define PAIRFAIR_STOCHASTIC_MODEL_HPP_

#include <iosfwd>
#include <vector>

#include "pairfair/model.hpp"

namespace pairfair {

// Finite mixture of scoring functions. Drawing f ~ this model picks atom t
// with probability probabilities[t].
struct StochasticModel {
  std::vector<Model> models;
  std::vector<double> probabilities;

  static StochasticModel single(Model m) { return {{std::move(m)}, {1.0}}; }

  std::size_t size() const { return models.size(); }
  // Throws unless probabilities are nonnegative and sum to 1 within 1e-12.
  void validate() const;
  // Index of the highest-probability atom (first on ties).
  std::size_t mode() const;

  bool operator==(const StochasticModel&) const = default;
};

void write_stochastic_model(std::ostream& out, const StochasticModel& smodel);
// Also accepts a bare single-model file, returned as a one-atom mixture.
StochasticModel read_stochastic_model(std::istream& in);

}  // namespace pairfair

#endif  // PAIRFAIR_STOCHASTIC_MODEL_HPP_
