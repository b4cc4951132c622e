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

#include "pairfair/surrogate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pairfair/errors.hpp"

namespace pairfair {

HingeValue hinge_lower(double d) {
  if (d <= 1.0) return {d, 1.0};
  return {1.0, 0.0};
}

HingeValue hinge_upper(double d) {
  if (d >= -1.0) return {1.0 + d, 1.0};
  return {0.0, 0.0};
}

// ---------------------------------------------------------------------------
// Rates

Rate rate_all(const PairSet& pairs, std::string name) {
  Rate r;
  r.name = std::move(name);
  r.pairs.reserve(pairs.size());
  for (const Pair& p : pairs.pairs()) r.pairs.push_back({p.better, p.worse});
  return r;
}

Rate rate_cells(const PairSet& pairs, std::span<const int> cells, std::string name) {
  Rate r;
  r.name = std::move(name);
  std::vector<int> idx;
  for (int c : cells) {
    const auto& members = pairs.cell(c);
    idx.insert(idx.end(), members.begin(), members.end());
  }
  std::sort(idx.begin(), idx.end());
  r.pairs.reserve(idx.size());
  for (int p : idx) r.pairs.push_back({pairs[p].better, pairs[p].worse});
  return r;
}

namespace {

int groups_of(const PairSet& pairs) {
  if (!pairs.protection().is_discrete()) {
    throw DataError("group rates need discrete protection");
  }
  return pairs.protection().num_groups;
}

}  // namespace

Rate rate_cell(const PairSet& pairs, int i, int j) {
  const int k = groups_of(pairs);
  const int cell = discrete_cell(i, j, k);
  Rate r = rate_cells(pairs, std::span<const int>(&cell, 1), fmt::format("A{}>{}", i, j));
  r.key = {RateKey::Kind::kCell, i, j};
  return r;
}

Rate rate_row(const PairSet& pairs, int i) {
  const int k = groups_of(pairs);
  std::vector<int> cells;
  for (int j = 0; j < k; ++j) cells.push_back(discrete_cell(i, j, k));
  Rate r = rate_cells(pairs, cells, fmt::format("A{}>:", i));
  r.key = {RateKey::Kind::kRow, i, 0};
  return r;
}

Rate rate_col(const PairSet& pairs, int i) {
  const int k = groups_of(pairs);
  std::vector<int> cells;
  for (int j = 0; j < k; ++j) cells.push_back(discrete_cell(j, i, k));
  Rate r = rate_cells(pairs, cells, fmt::format("A:>{}", i));
  r.key = {RateKey::Kind::kCol, i, 0};
  return r;
}

Rate rate_continuous(const PairSet& pairs, bool greater) {
  if (!pairs.protection().is_continuous()) {
    throw DataError("continuous rates need a continuous attribute");
  }
  const int cell = greater ? kCellGreater : kCellLess;
  Rate r = rate_cells(pairs, std::span<const int>(&cell, 1), greater ? "A>" : "A<");
  r.key = {greater ? RateKey::Kind::kGreater : RateKey::Kind::kLess, 0, 0};
  return r;
}

Rate rate_parity(const PairSet& parity_pairs, int i, int j) {
  if (parity_pairs.mode() != PairMode::kParity) {
    throw DataError("parity rate needs parity pairs");
  }
  const int k = groups_of(parity_pairs);
  if (i == j) throw DataError("parity rate needs two distinct groups");
  Rate r;
  r.name = fmt::format("P{}>{}", i, j);
  r.key = {RateKey::Kind::kParity, i, j};
  const int cell = discrete_cell(std::min(i, j), std::max(i, j), k);
  for (int p : parity_pairs.cell(cell)) {
    const Pair& pr = parity_pairs[p];
    if (i < j) {
      r.pairs.push_back({pr.better, pr.worse});
    } else {
      r.pairs.push_back({pr.worse, pr.better});
    }
  }
  return r;
}

double exact_rate(std::span<const double> scores, const Rate& rate) {
  if (rate.empty()) throw DataError(fmt::format("rate '{}' has no pairs", rate.name));
  double sum = 0.0;
  for (std::size_t p = 0; p < rate.pairs.size(); ++p) {
    const OrientedPair& op = rate.pairs[p];
    if (scores[op.first] > scores[op.second]) {
      sum += rate.weights.empty() ? 1.0 : rate.weights[p];
    }
  }
  return sum / rate.denominator();
}

MaybeReal lookup_rate(const Evaluation& eval, const RateKey& key) {
  using K = RateKey::Kind;
  switch (key.kind) {
    case K::kAll:
      return eval.auc;
    case K::kGreater:
      return eval.continuous.greater;
    case K::kLess:
      return eval.continuous.less;
    case K::kParity: {
      if (eval.parity.empty()) return std::nullopt;
      const int k = eval.protection.num_groups;
      return eval.parity[key.i * k + key.j];
    }
    case K::kCell:
      if (!eval.matrix) return std::nullopt;
      return eval.matrix->at(key.i, key.j);
    case K::kRow:
      if (!eval.matrix) return std::nullopt;
      return eval.matrix->row_marginals[key.i];
    case K::kCol:
      if (!eval.matrix) return std::nullopt;
      return eval.matrix->col_marginals[key.i];
  }
  return std::nullopt;
}

int ConstraintSet::add_rate(Rate r) {
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i].name == r.name) return static_cast<int>(i);
  }
  rates.push_back(std::move(r));
  return static_cast<int>(rates.size()) - 1;
}

namespace {

struct NamedCombination {
  std::string name;
  std::vector<Rate> rates;  // combined with +1 coefficients
};

// Adds value(a) - value(b) <= eps and value(b) - value(a) <= eps.
void add_two_sided(ConstraintSet& cs, const NamedCombination& a,
                   const NamedCombination& b, double eps) {
  const auto any_empty = [](const NamedCombination& x) {
    return std::any_of(x.rates.begin(), x.rates.end(),
                       [](const Rate& r) { return r.empty(); });
  };
  if (any_empty(a) || any_empty(b)) {
    cs.warnings.push_back(fmt::format("constraint {} vs {} inactive: empty pair cell",
                                      a.name, b.name));
    return;
  }
  std::vector<int> ia, ib;
  for (const Rate& r : a.rates) ia.push_back(cs.add_rate(r));
  for (const Rate& r : b.rates) ib.push_back(cs.add_rate(r));
  const auto make = [&](const std::vector<int>& pos, const std::vector<int>& neg,
                        const std::string& pn, const std::string& nn) {
    Constraint c;
    c.name = fmt::format("{}-{}", pn, nn);
    for (int r : pos) c.terms.push_back({r, 1.0});
    for (int r : neg) c.terms.push_back({r, -1.0});
    c.bound = eps;
    cs.constraints.push_back(std::move(c));
  };
  make(ia, ib, a.name, b.name);
  make(ib, ia, b.name, a.name);
}

NamedCombination single(Rate r) {
  NamedCombination n;
  n.name = r.name;
  n.rates.push_back(std::move(r));
  return n;
}

NamedCombination row_plus_col(const PairSet& pairs, int i) {
  NamedCombination n;
  n.name = fmt::format("(A{}>:+A:>{})", i, i);
  n.rates.push_back(rate_row(pairs, i));
  n.rates.push_back(rate_col(pairs, i));
  return n;
}

}  // namespace

ConstraintSet build_constraints(const FairnessSpec& spec, const PairSet& pairs,
                                const PairSet* parity_pairs) {
  if (spec.epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
  if (!compatible(spec.criterion, pairs.protection())) {
    throw ConfigError(fmt::format("criterion {} does not apply to this dataset",
                                  to_string(spec.criterion)));
  }
  ConstraintSet cs;
  const double eps = spec.epsilon;
  if (spec.criterion == Criterion::kContinuousEo) {
    add_two_sided(cs, single(rate_continuous(pairs, true)),
                  single(rate_continuous(pairs, false)), eps);
    return cs;
  }
  const int k = pairs.protection().num_groups;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      switch (spec.criterion) {
        case Criterion::kCrossGroupEo:
          add_two_sided(cs, single(rate_cell(pairs, i, j)),
                        single(rate_cell(pairs, j, i)), eps);
          break;
        case Criterion::kInGroupEa:
          add_two_sided(cs, single(rate_cell(pairs, i, i)),
                        single(rate_cell(pairs, j, j)), eps);
          break;
        case Criterion::kAllEntries:
          break;
        case Criterion::kMarginalEo:
          add_two_sided(cs, single(rate_row(pairs, i)), single(rate_row(pairs, j)),
                        eps);
          break;
        case Criterion::kStatisticalParity:
          if (parity_pairs == nullptr) {
            throw DataError("statistical parity needs parity pairs");
          }
          add_two_sided(cs, single(rate_parity(*parity_pairs, i, j)),
                        single(rate_parity(*parity_pairs, j, i)), eps);
          break;
        case Criterion::kSymmetricEa:
          add_two_sided(cs, row_plus_col(pairs, i), row_plus_col(pairs, j), eps);
          break;
        case Criterion::kContinuousEo:
          break;
      }
    }
  }
  if (spec.criterion == Criterion::kAllEntries) {
    for (Criterion part : {Criterion::kCrossGroupEo, Criterion::kInGroupEa}) {
      ConstraintSet sub = build_constraints({part, eps}, pairs, parity_pairs);
      for (Constraint& c : sub.constraints) {
        for (LinearTerm& t : c.terms) t.rate = cs.add_rate(sub.rates[t.rate]);
        cs.constraints.push_back(std::move(c));
      }
      cs.warnings.insert(cs.warnings.end(), sub.warnings.begin(), sub.warnings.end());
    }
  }
  return cs;
}

std::size_t RobustGoal::num_terms() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

RobustGoal build_robust_goal(Criterion criterion, const PairSet& pairs,
                             const PairSet* parity_pairs) {
  if (!compatible(criterion, pairs.protection())) {
    throw ConfigError(fmt::format("criterion {} does not apply to this dataset",
                                  to_string(criterion)));
  }
  RobustGoal goal;
  auto add_rate = [&](Rate r) {
    for (std::size_t i = 0; i < goal.rates.size(); ++i) {
      if (goal.rates[i].name == r.name) return static_cast<int>(i);
    }
    goal.rates.push_back(std::move(r));
    return static_cast<int>(goal.rates.size()) - 1;
  };
  auto new_group = [&]() {
    goal.groups.emplace_back();
    goal.names.emplace_back();
  };
  auto add_term = [&](std::vector<Rate> rates, std::string name) {
    if (std::any_of(rates.begin(), rates.end(), [](const Rate& r) { return r.empty(); })) {
      return;
    }
    std::vector<LinearTerm> term;
    for (Rate& r : rates) term.push_back({add_rate(std::move(r)), 1.0});
    goal.groups.back().push_back(std::move(term));
    goal.names.back().push_back(std::move(name));
  };

  new_group();
  if (criterion == Criterion::kAllEntries) {
    // min over off-diagonal cells + min over diagonal cells.
    const int k = pairs.protection().num_groups;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i != j) add_term({rate_cell(pairs, i, j)}, fmt::format("A{}>{}", i, j));
      }
    }
    new_group();
    for (int i = 0; i < k; ++i) {
      add_term({rate_cell(pairs, i, i)}, fmt::format("A{}>{}", i, i));
    }
  } else {
    add_term({rate_all(pairs)}, "auc");
    if (criterion == Criterion::kContinuousEo) {
      add_term({rate_continuous(pairs, true)}, "A>");
      add_term({rate_continuous(pairs, false)}, "A<");
    } else {
      const int k = pairs.protection().num_groups;
      for (int i = 0; i < k; ++i) {
        switch (criterion) {
          case Criterion::kCrossGroupEo:
            for (int j = 0; j < k; ++j) {
              if (i != j) add_term({rate_cell(pairs, i, j)}, fmt::format("A{}>{}", i, j));
            }
            break;
          case Criterion::kInGroupEa:
            add_term({rate_cell(pairs, i, i)}, fmt::format("A{}>{}", i, i));
            break;
          case Criterion::kMarginalEo:
            add_term({rate_row(pairs, i)}, fmt::format("A{}>:", i));
            break;
          case Criterion::kStatisticalParity:
            if (parity_pairs == nullptr) {
              throw DataError("statistical parity needs parity pairs");
            }
            for (int j = 0; j < k; ++j) {
              if (i != j) {
                add_term({rate_parity(*parity_pairs, i, j)}, fmt::format("P{}>{}", i, j));
              }
            }
            break;
          case Criterion::kSymmetricEa:
            add_term({rate_row(pairs, i), rate_col(pairs, i)},
                     fmt::format("(A{}>:+A:>{})", i, i));
            break;
          default:
            break;
        }
      }
    }
  }
  // Drop groups emptied by missing cells.
  for (std::size_t g = goal.groups.size(); g-- > 0;) {
    if (goal.groups[g].empty()) {
      goal.groups.erase(goal.groups.begin() + static_cast<std::ptrdiff_t>(g));
      goal.names.erase(goal.names.begin() + static_cast<std::ptrdiff_t>(g));
    }
  }
  if (goal.groups.empty()) throw DataError("robust goal has no defined accuracy terms");
  return goal;
}

// ---------------------------------------------------------------------------
// Surrogates

SurrogateValue weighted_surrogate(const Model& model, const Dataset& dataset,
                                  std::span<const Rate> rates,
                                  std::span<const RateWeight> weights) {
  const std::size_t n = dataset.size();
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = model.score(dataset[i].features);

  std::vector<double> coef(n, 0.0);
  SurrogateValue out;
  for (const RateWeight& rw : weights) {
    if (rw.weight == 0.0) continue;
    const Rate& rate = rates[rw.rate];
    if (rate.empty()) {
      throw DataError(fmt::format("surrogate of empty rate '{}'", rate.name));
    }
    const double scale = rw.weight / rate.denominator();
    const bool weighted = !rate.weights.empty();
    double acc = 0.0;
    for (std::size_t p = 0; p < rate.pairs.size(); ++p) {
      const OrientedPair& op = rate.pairs[p];
      const double d = scores[op.first] - scores[op.second];
      const HingeValue h = rw.bound == Bound::kLower ? hinge_lower(d) : hinge_upper(d);
      const double w = weighted ? rate.weights[p] : 1.0;
      acc += w * h.value;
      if (h.slope != 0.0) {
        const double g = scale * w * h.slope;
        coef[op.first] += g;
        coef[op.second] -= g;
      }
    }
    out.value += scale * acc;
  }
  out.gradient.assign(model.theta().size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (coef[i] != 0.0) model.accumulate_gradient(dataset[i].features, coef[i], out.gradient);
  }
  return out;
}

SurrogateValue surrogate_auc(const Model& model, const Dataset& dataset,
                             const PairSet& pairs) {
  if (pairs.empty()) throw DataError("surrogate AUC over an empty pair set");
  const Rate r = rate_all(pairs);
  const RateWeight w{0, Bound::kLower, 1.0};
  return weighted_surrogate(model, dataset, std::span<const Rate>(&r, 1),
                            std::span<const RateWeight>(&w, 1));
}

void append_combination(std::vector<RateWeight>& out,
                        std::span<const LinearTerm> terms, double scale,
                        Bound which) {
  for (const LinearTerm& t : terms) {
    const bool positive = t.coef > 0.0;
    const Bound b = (which == Bound::kUpper) == positive ? Bound::kUpper : Bound::kLower;
    out.push_back({t.rate, b, scale * t.coef});
  }
}

SurrogateValue surrogate_delta(const Model& model, const Dataset& dataset,
                               const ConstraintSet& constraints, std::size_t c) {
  std::vector<RateWeight> w;
  append_combination(w, constraints.constraints.at(c).terms, 1.0, Bound::kUpper);
  return weighted_surrogate(model, dataset, constraints.rates, w);
}

namespace {

void check_simplex(std::span<const double> lambda, std::size_t expected) {
  if (lambda.size() != expected) {
    throw DataError(fmt::format("lambda has {} entries, expected {}", lambda.size(),
                                expected));
  }
  double sum = 0.0;
  for (double l : lambda) {
    if (l < -1e-9) throw DataError("lambda has a negative entry");
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DataError(fmt::format("lambda sums to {:.12g}, not 1", sum));
  }
}

}  // namespace

SurrogateValue proxy_lagrangian_theta(const Model& model, const Dataset& dataset,
                                      std::span<const double> lambda,
                                      const Rate& objective,
                                      const ConstraintSet& constraints) {
  const std::size_t m = constraints.size();
  check_simplex(lambda, m + 1);
  std::vector<Rate> rates = constraints.rates;
  rates.push_back(objective);
  const int obj_index = static_cast<int>(rates.size()) - 1;

  std::vector<RateWeight> w{{obj_index, Bound::kLower, lambda[0]}};
  double offset = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    append_combination(w, constraints.constraints[c].terms, -lambda[c + 1],
                       Bound::kUpper);
    offset += lambda[c + 1] * constraints.constraints[c].bound;
  }
  SurrogateValue out = weighted_surrogate(model, dataset, rates, w);
  out.value += offset;
  return out;
}

std::vector<double> lagrangian_lambda(std::span<const double> scores,
                                      const ConstraintSet& constraints) {
  std::vector<double> exact(constraints.rates.size());
  for (std::size_t r = 0; r < exact.size(); ++r) {
    exact[r] = exact_rate(scores, constraints.rates[r]);
  }
  std::vector<double> g(constraints.size() + 1, 0.0);
  for (std::size_t c = 0; c < constraints.size(); ++c) {
    double v = 0.0;
    for (const LinearTerm& t : constraints.constraints[c].terms) {
      v += t.coef * exact[t.rate];
    }
    g[c + 1] = v - constraints.constraints[c].bound;
  }
  return g;
}

std::vector<double> lagrangian_lambda(const Model& model, const Dataset& dataset,
                                      const ConstraintSet& constraints) {
  return lagrangian_lambda(score_all(model, dataset), constraints);
}

}  // namespace pairfair
