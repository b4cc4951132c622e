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

#include "pairfair/model.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "pairfair/errors.hpp"
#include "pairfair/rng.hpp"

namespace pairfair {

std::size_t ModelSpec::num_params() const {
  const auto d = static_cast<std::size_t>(input_dim);
  const auto h = static_cast<std::size_t>(hidden);
  return kind == Kind::kLinear ? d + 1 : (d + 1) * h + h + 1;
}

std::string model_kind_name(ModelSpec::Kind kind) {
  return kind == ModelSpec::Kind::kLinear ? "linear" : "mlp";
}

Model::Model(ModelSpec spec, std::vector<double> theta)
    : spec_(spec), theta_(std::move(theta)) {
  if (spec_.input_dim < 0) throw ConfigError("negative model input dimension");
  if (spec_.kind == ModelSpec::Kind::kMlp && spec_.hidden < 1) {
    throw ConfigError("mlp needs at least one hidden unit");
  }
  if (theta_.size() != spec_.num_params()) {
    throw ConfigError(fmt::format("parameter vector has length {}, spec needs {}",
                                  theta_.size(), spec_.num_params()));
  }
}

Model Model::init(const ModelSpec& spec, std::uint64_t seed) {
  std::vector<double> theta(spec.num_params(), 0.0);
  if (spec.kind == ModelSpec::Kind::kMlp) {
    Rng rng(seed);
    const int d = spec.input_dim;
    const int h = spec.hidden;
    const double in_bound = 1.0 / std::sqrt(static_cast<double>(std::max(d, 1)));
    const double out_bound = 1.0 / std::sqrt(static_cast<double>(h));
    for (int k = 0; k < h * d; ++k) theta[k] = rng.uniform(-in_bound, in_bound);
    // c stays zero
    const std::size_t v0 = static_cast<std::size_t>(h) * d + h;
    for (int k = 0; k < h; ++k) theta[v0 + k] = rng.uniform(-out_bound, out_bound);
  }
  return Model(spec, std::move(theta));
}

void Model::check_input(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != spec_.input_dim) {
    throw DataError(fmt::format("input has {} features, model expects {}", x.size(),
                                spec_.input_dim));
  }
}

double Model::score(std::span<const double> x) const {
  check_input(x);
  const int d = spec_.input_dim;
  if (spec_.kind == ModelSpec::Kind::kLinear) {
    double s = theta_[d];
    for (int k = 0; k < d; ++k) s += theta_[k] * x[k];
    return s;
  }
  const int h = spec_.hidden;
  const double* w = theta_.data();
  const double* c = w + static_cast<std::size_t>(h) * d;
  const double* v = c + h;
  double s = v[h];
  for (int u = 0; u < h; ++u) {
    double pre = c[u];
    for (int k = 0; k < d; ++k) pre += w[u * d + k] * x[k];
    if (pre > 0.0) s += v[u] * pre;
  }
  return s;
}

void Model::accumulate_gradient(std::span<const double> x, double coef,
                                std::span<double> grad) const {
  check_input(x);
  if (grad.size() != theta_.size()) {
    throw DataError("gradient buffer has the wrong length");
  }
  const int d = spec_.input_dim;
  if (spec_.kind == ModelSpec::Kind::kLinear) {
    for (int k = 0; k < d; ++k) grad[k] += coef * x[k];
    grad[d] += coef;
    return;
  }
  const int h = spec_.hidden;
  const std::size_t c0 = static_cast<std::size_t>(h) * d;
  const std::size_t v0 = c0 + h;
  for (int u = 0; u < h; ++u) {
    double pre = theta_[c0 + u];
    for (int k = 0; k < d; ++k) pre += theta_[u * d + k] * x[k];
    if (pre <= 0.0) continue;
    const double back = coef * theta_[v0 + u];
    for (int k = 0; k < d; ++k) grad[u * d + k] += back * x[k];
    grad[c0 + u] += back;
    grad[v0 + u] += coef * pre;
  }
  grad[v0 + h] += coef;
}

std::vector<double> Model::score_gradient(std::span<const double> x) const {
  std::vector<double> g(theta_.size(), 0.0);
  accumulate_gradient(x, 1.0, g);
  return g;
}

std::vector<double> Model::score_diff_gradient(
    std::span<const double> x, std::span<const double> x_prime) const {
  std::vector<double> g(theta_.size(), 0.0);
  accumulate_gradient(x, 1.0, g);
  accumulate_gradient(x_prime, -1.0, g);
  return g;
}

void write_model(std::ostream& out, const Model& model) {
  const ModelSpec& s = model.spec();
  out << "pairfair-model 1\n";
  out << "kind " << model_kind_name(s.kind) << '\n';
  out << "input_dim " << s.input_dim << '\n';
  out << "hidden " << s.hidden << '\n';
  out << "theta " << model.theta().size() << '\n';
  for (double t : model.theta()) out << fmt::format("{:.17g}\n", t);
}

namespace {

void expect_token(std::istream& in, const std::string& want) {
  std::string tok;
  if (!(in >> tok) || tok != want) {
    throw DataError(fmt::format("model file: expected '{}', got '{}'", want, tok));
  }
}

}  // namespace

Model read_model(std::istream& in) {
  expect_token(in, "pairfair-model");
  int version = 0;
  if (!(in >> version) || version != 1) {
    throw DataError("model file: unsupported version");
  }
  ModelSpec spec;
  std::string kind;
  expect_token(in, "kind");
  in >> kind;
  if (kind == "linear") {
    spec.kind = ModelSpec::Kind::kLinear;
  } else if (kind == "mlp") {
    spec.kind = ModelSpec::Kind::kMlp;
  } else {
    throw DataError(fmt::format("model file: unknown kind '{}'", kind));
  }
  expect_token(in, "input_dim");
  in >> spec.input_dim;
  expect_token(in, "hidden");
  in >> spec.hidden;
  expect_token(in, "theta");
  std::size_t n = 0;
  in >> n;
  if (!in) throw DataError("model file: malformed header");
  std::vector<double> theta(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::string tok;
    if (!(in >> tok)) throw DataError("model file: truncated parameter list");
    theta[k] = std::stod(tok);
  }
  return Model(spec, std::move(theta));
}

}  // namespace pairfair
