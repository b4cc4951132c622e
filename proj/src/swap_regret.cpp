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

#include "pairfair/swap_regret.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "pairfair/errors.hpp"

namespace pairfair {

namespace {

double residual_l1(std::span<const double> m, std::size_t n, const std::vector<double>& x) {
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m[i * n + j] * x[j];
    r += std::abs(s - x[i]);
  }
  return r;
}

void normalize(std::vector<double>& x) {
  double sum = 0.0;
  for (double& v : x) {
    v = std::max(v, 0.0);
    sum += v;
  }
  for (double& v : x) v /= sum;
}

// Solves (M - I) x = 0 with the last row replaced by sum(x) = 1. Returns
// nullopt when the system is numerically singular.
std::optional<std::vector<double>> direct_solve(std::span<const double> m, std::size_t n) {
  std::vector<double> a(n * (n + 1), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * (n + 1) + j] = (i + 1 == n) ? 1.0 : m[i * n + j] - (i == j ? 1.0 : 0.0);
    }
    a[i * (n + 1) + n] = (i + 1 == n) ? 1.0 : 0.0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * (n + 1) + c]) > std::abs(a[piv * (n + 1) + c])) piv = r;
    }
    if (std::abs(a[piv * (n + 1) + c]) < 1e-300) return std::nullopt;
    for (std::size_t k = 0; k <= n; ++k) std::swap(a[c * (n + 1) + k], a[piv * (n + 1) + k]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r * (n + 1) + c] / a[c * (n + 1) + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k <= n; ++k) a[r * (n + 1) + k] -= f * a[c * (n + 1) + k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i * (n + 1) + n] / a[i * (n + 1) + i];
  normalize(x);
  return x;
}

}  // namespace

std::vector<double> stationary_distribution(std::span<const double> matrix,
                                            std::size_t n) {
  if (n == 0 || matrix.size() != n * n) {
    throw NumericalError("stationary distribution: matrix is not square");
  }
  constexpr int kMaxIterations = 10000;
  constexpr double kTolerance = 1e-8;
  // After kPlainIterations the lazy chain (M + I) / 2 is iterated instead. It
  // has the same fixed points and does not oscillate when M is close to a
  // permutation.
  constexpr int kPlainIterations = 100;
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> y(n);
  for (int it = 0; it < kMaxIterations; ++it) {
    if (residual_l1(matrix, n, x) <= kTolerance) {
      normalize(x);
      return x;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += matrix[i * n + j] * x[j];
      y[i] = it < kPlainIterations ? s : 0.5 * (s + x[i]);
    }
    double sum = 0.0;
    for (double v : y) sum += v;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / sum;
  }
  // Slow mixing: finish with a direct solve.
  if (auto d = direct_solve(matrix, n); d && residual_l1(matrix, n, *d) <= kTolerance) {
    return *d;
  }
  const double r = residual_l1(matrix, n, x);
  if (r <= 1e-6) {
    normalize(x);
    return x;
  }
  throw NumericalError(fmt::format(
      "stationary distribution did not converge: residual {:.3g}", r));
}

namespace {

void refresh(LambdaState& s) {
  const std::size_t n = s.dim();
  for (std::size_t j = 0; j < n; ++j) {
    double top = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) top = std::max(top, s.log_m[i * n + j]);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += std::exp(s.log_m[i * n + j] - top);
    const double log_norm = top + std::log(sum);
    for (std::size_t i = 0; i < n; ++i) {
      s.log_m[i * n + j] -= log_norm;
      s.matrix[i * n + j] = std::exp(s.log_m[i * n + j]);
    }
  }
  s.lambda = stationary_distribution(s.matrix, n);
}

}  // namespace

LambdaState initial_lambda_state(std::size_t num_constraints, double objective_weight) {
  const std::size_t n = num_constraints + 1;
  LambdaState s;
  s.n = n;
  s.log_m.assign(n * n, 0.0);
  s.matrix.assign(n * n, 0.0);
  if (num_constraints == 0) objective_weight = 1.0;
  if (!(objective_weight > 0.0 && objective_weight <= 1.0) ||
      (num_constraints > 0 && objective_weight >= 1.0)) {
    throw ConfigError("initial objective weight must lie in (0, 1)");
  }
  const double rest =
      num_constraints == 0 ? 0.0 : (1.0 - objective_weight) / num_constraints;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      s.log_m[i * n + j] = std::log(i == 0 ? objective_weight : rest);
    }
  }
  refresh(s);
  return s;
}

LambdaState swap_regret_update(const LambdaState& state,
                               std::span<const double> gradient, double eta) {
  const std::size_t n = state.dim();
  if (gradient.size() != n) {
    throw DataError(fmt::format("lambda gradient has {} entries, expected {}",
                                gradient.size(), n));
  }
  if (std::all_of(gradient.begin(), gradient.end(), [](double g) { return g == 0.0; })) {
    return state;
  }
  LambdaState next = state;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      next.log_m[i * n + j] += eta * gradient[i] * state.lambda[j];
    }
  }
  refresh(next);
  return next;
}

}  // namespace pairfair
