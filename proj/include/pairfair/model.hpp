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

#ifndef PAIRFAIR_MODEL_HPP_
#define PAIRFAIR_MODEL_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pairfair {

struct ModelSpec {
  enum class Kind { kLinear, kMlp };
  Kind kind = Kind::kLinear;
  int input_dim = 0;
  int hidden = 0;  // mlp only

  static ModelSpec linear(int dim) { return {Kind::kLinear, dim, 0}; }
  static ModelSpec mlp(int dim, int hidden) { return {Kind::kMlp, dim, hidden}; }

  // linear: dim + 1; mlp: (dim + 1) * h + h + 1.
  std::size_t num_params() const;
  bool operator==(const ModelSpec&) const = default;
};

// Scoring function f_theta. Parameter layout:
//   linear: [w_0 .. w_{d-1}, b]
//   mlp:    [W (h x d, row major), c (h), v (h), b], f(x) = v . relu(W x + c) + b
class Model {
 public:
  Model(ModelSpec spec, std::vector<double> theta);

  // Linear weights are zero; mlp weights are uniform in +-1/sqrt(fan_in) and
  // all biases zero.
  static Model init(const ModelSpec& spec, std::uint64_t seed);

  const ModelSpec& spec() const { return spec_; }
  const std::vector<double>& theta() const { return theta_; }
  std::vector<double>& mutable_theta() { return theta_; }

  double score(std::span<const double> x) const;

  // grad += coef * d f(x) / d theta.
  void accumulate_gradient(std::span<const double> x, double coef,
                           std::span<double> grad) const;

  std::vector<double> score_gradient(std::span<const double> x) const;

  // d/dtheta [f(x) - f(x')].
  std::vector<double> score_diff_gradient(std::span<const double> x,
                                          std::span<const double> x_prime) const;

  bool operator==(const Model&) const = default;

 private:
  void check_input(std::span<const double> x) const;

  ModelSpec spec_;
  std::vector<double> theta_;
};

// Plain-text form: a header with the spec followed by one parameter per line
// at 17 significant digits, so parsing returns the exact same doubles.
void write_model(std::ostream& out, const Model& model);
Model read_model(std::istream& in);

std::string model_kind_name(ModelSpec::Kind kind);

}  // namespace pairfair

#endif  // PAIRFAIR_MODEL_HPP_
