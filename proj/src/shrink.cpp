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

#include "pairfair/shrink.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pairfair/errors.hpp"

namespace pairfair {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

// Tableau with one row per constraint plus the objective row last; the last
// column holds the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Maximizes the objective row (stored as reduced costs: entering columns
  // have positive cost) over columns < `usable`. Returns false if unbounded.
  bool run(std::size_t usable) {
    while (true) {
      std::size_t enter = usable;
      for (std::size_t c = 0; c < usable; ++c) {
        if (cost(c) > kPivotTol) {
          enter = c;
          break;
        }
      }
      if (enter == usable) return true;
      std::size_t leave = rows_;
      double best = INFINITY;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = at(r, cols_) / a;
        if (ratio < best - 1e-14 ||
            (std::abs(ratio - best) <= 1e-14 && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.objective.size();
  const std::size_t m_ub = lp.a_ub.size();
  const std::size_t m_eq = lp.a_eq.size();
  if (lp.b_ub.size() != m_ub || lp.b_eq.size() != m_eq) {
    throw NumericalError("lp: right-hand side length mismatch");
  }
  const std::size_t m = m_ub + m_eq;
  // Columns: x (n), slacks (m_ub), artificials (m).
  const std::size_t n_slack = m_ub;
  const std::size_t art0 = n + n_slack;
  const std::size_t cols = art0 + m;
  Tableau tab(m, cols);

  for (std::size_t r = 0; r < m; ++r) {
    const bool ub = r < m_ub;
    const std::vector<double>& row = ub ? lp.a_ub[r] : lp.a_eq[r - m_ub];
    if (row.size() != n) throw NumericalError("lp: constraint row length mismatch");
    double b = ub ? lp.b_ub[r] : lp.b_eq[r - m_ub];
    const double sign = b < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < n; ++c) tab.at(r, c) = sign * row[c];
    if (ub) tab.at(r, n + r) = sign;
    tab.at(r, art0 + r) = 1.0;
    tab.rhs(r) = sign * b;
    tab.basis()[r] = art0 + r;
  }

  // Phase 1: maximize -sum(artificials). With artificials basic, the reduced
  // cost of column c is sum_r a_rc.
  for (std::size_t c = 0; c <= cols; ++c) tab.cost(c) = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < art0; ++c) tab.cost(c) += tab.at(r, c);
    tab.cost(cols) += tab.rhs(r);
  }
  tab.run(art0);
  double infeasibility = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis()[r] >= art0) infeasibility += tab.rhs(r);
  }
  LpSolution sol;
  if (infeasibility > kFeasTol) {
    sol.status = LpStatus::kInfeasible;
    return sol;
  }
  // Drive remaining (zero-level) artificials out of the basis.
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis()[r] < art0) continue;
    for (std::size_t c = 0; c < art0; ++c) {
      if (std::abs(tab.at(r, c)) > kPivotTol) {
        tab.pivot(r, c);
        break;
      }
    }
    // A row with no usable column is redundant; its artificial stays at 0.
  }

  // Phase 2: reduced costs for the real objective.
  for (std::size_t c = 0; c <= cols; ++c) tab.cost(c) = 0.0;
  for (std::size_t c = 0; c < n; ++c) tab.cost(c) = lp.objective[c];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = tab.basis()[r];
    const double cb = b < n ? lp.objective[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) tab.cost(c) -= cb * tab.at(r, c);
  }
  // Artificial columns are never re-entered.
  if (!tab.run(art0)) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  sol.status = LpStatus::kOptimal;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis()[r] < n) sol.x[tab.basis()[r]] = std::max(0.0, tab.rhs(r));
  }
  sol.value = 0.0;
  for (std::size_t c = 0; c < n; ++c) sol.value += lp.objective[c] * sol.x[c];
  return sol;
}

namespace {

// Renormalizes the snapshot weights to sum to exactly 1 after clipping
// round-off.
std::vector<double> clean_simplex(std::vector<double> p) {
  for (double& v : p) {
    if (v < 1e-15) v = 0.0;
  }
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

ShrinkResult shrink(std::span<const double> objective,
                    const std::vector<std::vector<double>>& constraints,
                    std::span<const double> bounds) {
  const std::size_t t = objective.size();
  if (t == 0) throw NumericalError("shrink: no snapshots");
  if (constraints.size() != bounds.size()) {
    throw NumericalError("shrink: constraint/bound count mismatch");
  }
  LinearProgram lp;
  lp.objective.assign(objective.begin(), objective.end());
  for (std::size_t c = 0; c < constraints.size(); ++c) {
    if (constraints[c].size() != t) throw NumericalError("shrink: ragged constraints");
    lp.a_ub.push_back(constraints[c]);
    lp.b_ub.push_back(bounds[c]);
  }
  lp.a_eq.push_back(std::vector<double>(t, 1.0));
  lp.b_eq.push_back(1.0);
  const LpSolution sol = solve_lp(lp);
  ShrinkResult out;
  if (sol.status != LpStatus::kOptimal) return out;
  out.feasible = true;
  out.probabilities = clean_simplex(sol.x);
  out.objective = 0.0;
  for (std::size_t i = 0; i < t; ++i) out.objective += out.probabilities[i] * objective[i];
  return out;
}

ShrinkResult shrink_robust(const std::vector<std::vector<double>>& terms,
                           std::span<const int> group_of, int num_groups) {
  if (terms.empty()) throw NumericalError("shrink_robust: no terms");
  if (group_of.size() != terms.size()) {
    throw NumericalError("shrink_robust: group map mismatch");
  }
  const std::size_t t = terms[0].size();
  if (t == 0) throw NumericalError("shrink_robust: no snapshots");
  const std::size_t g = static_cast<std::size_t>(num_groups);
  // Variables: p (t), s (g); s_g <= sum_t p_t * term_c[t] for c in g.
  LinearProgram lp;
  lp.objective.assign(t + g, 0.0);
  for (std::size_t k = 0; k < g; ++k) lp.objective[t + k] = 1.0;
  for (std::size_t c = 0; c < terms.size(); ++c) {
    if (terms[c].size() != t) throw NumericalError("shrink_robust: ragged terms");
    std::vector<double> row(t + g, 0.0);
    for (std::size_t i = 0; i < t; ++i) row[i] = -terms[c][i];
    row[t + static_cast<std::size_t>(group_of[c])] = 1.0;
    lp.a_ub.push_back(std::move(row));
    lp.b_ub.push_back(0.0);
  }
  std::vector<double> eq(t + g, 0.0);
  std::fill(eq.begin(), eq.begin() + static_cast<std::ptrdiff_t>(t), 1.0);
  lp.a_eq.push_back(std::move(eq));
  lp.b_eq.push_back(1.0);
  const LpSolution sol = solve_lp(lp);
  ShrinkResult out;
  if (sol.status != LpStatus::kOptimal) return out;
  out.feasible = true;
  out.probabilities =
      clean_simplex(std::vector<double>(sol.x.begin(),
                                        sol.x.begin() + static_cast<std::ptrdiff_t>(t)));
  // Objective recomputed from the cleaned weights.
  std::vector<double> best(g, INFINITY);
  for (std::size_t c = 0; c < terms.size(); ++c) {
    double v = 0.0;
    for (std::size_t i = 0; i < t; ++i) v += out.probabilities[i] * terms[c][i];
    auto& b = best[static_cast<std::size_t>(group_of[c])];
    b = std::min(b, v);
  }
  out.objective = 0.0;
  for (double b : best) out.objective += std::isfinite(b) ? b : 0.0;
  return out;
}

}  // namespace pairfair
