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

#include "pairfair/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace pairfair {

namespace {

using nlohmann::json;

json num(const MaybeReal& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return std::round(*v * 1e6) / 1e6;
}

json nums(std::span<const MaybeReal> v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(num(x));
  return a;
}

std::string cell(const MaybeReal& v) { return v ? fmt::format("{:.3f}", *v) : "  -  "; }

constexpr const char* kLogHeader =
    "iteration\tlambda\ttrain_surrogate\tvalidation_objective\t"
    "validation_violation\tvalidation_values";

bool is_number_list(const std::string& s) {
  if (s == "-") return true;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "nan") continue;
    try {
      std::size_t used = 0;
      std::stod(item, &used);
      if (used != item.size()) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

}  // namespace

nlohmann::json evaluation_json(const Evaluation& eval) {
  json j;
  j["auc"] = num(eval.auc);
  j["mse"] = num(eval.mse);
  if (eval.matrix) {
    const auto& m = *eval.matrix;
    const int k = m.num_groups;
    json rows = json::array();
    json counts = json::array();
    for (int i = 0; i < k; ++i) {
      json r = json::array();
      json c = json::array();
      for (int jj = 0; jj < k; ++jj) {
        r.push_back(num(m.at(i, jj)));
        c.push_back(m.count(i, jj));
      }
      rows.push_back(r);
      counts.push_back(c);
    }
    j["matrix"] = rows;
    j["counts"] = counts;
    j["row_marginals"] = nums(m.row_marginals);
    j["col_marginals"] = nums(m.col_marginals);
  } else {
    j["matrix"] = nullptr;
    j["counts"] = nullptr;
    j["row_marginals"] = nullptr;
    j["col_marginals"] = nullptr;
  }
  if (eval.protection.kind == Protection::Kind::kContinuous) {
    j["continuous"] = {{"greater", num(eval.continuous.greater)},
                       {"less", num(eval.continuous.less)}};
  }
  json v = json::object();
  for (Criterion c : all_criteria()) {
    if (compatible(c, eval.protection)) v[to_string(c)] = num(violation(eval, c));
  }
  j["violations"] = v;
  return j;
}

nlohmann::json stochastic_json(const StochasticEvaluation& eval,
                               std::span<const double> probabilities) {
  json j;
  j["expected"] = evaluation_json(eval.expected);
  json atoms = json::array();
  for (std::size_t a = 0; a < eval.atoms.size(); ++a) {
    json e = evaluation_json(eval.atoms[a]);
    e["probability"] = num(probabilities[a]);
    atoms.push_back(e);
  }
  j["atoms"] = atoms;
  return j;
}

std::string render_matrix(const PairwiseAccuracyMatrix& m) {
  std::string out = "better\\worse";
  for (int j = 0; j < m.num_groups; ++j) out += fmt::format("  group {}", j);
  out += '\n';
  for (int i = 0; i < m.num_groups; ++i) {
    out += fmt::format("group {:<6}", i);
    for (int j = 0; j < m.num_groups; ++j) out += fmt::format("  {:>7}", cell(m.at(i, j)));
    out += '\n';
  }
  return out;
}

std::string render_evaluation(const Evaluation& eval) {
  std::string out;
  if (eval.mse) out += fmt::format("MSE: {:.6f}\n", *eval.mse);
  out += fmt::format("AUC: {}\n", eval.auc ? fmt::format("{:.6f}", *eval.auc) : "undefined");
  if (eval.matrix) out += render_matrix(*eval.matrix);
  if (eval.protection.kind == Protection::Kind::kContinuous) {
    out += fmt::format("A>: {}  A<: {}\n", cell(eval.continuous.greater),
                       cell(eval.continuous.less));
  }
  for (Criterion c : all_criteria()) {
    if (!compatible(c, eval.protection)) continue;
    const MaybeReal v = violation(eval, c);
    out += fmt::format("{}: {}\n", to_string(c), v ? fmt::format("{:.6f}", *v) : "undefined");
  }
  return out;
}

std::string format_summary_row(const SummaryRow& row) {
  if (row.problem) return fmt::format("{}\tMALFORMED: {}", row.method, *row.problem);
  const std::string v = row.violation ? fmt::format("{:.2f}", *row.violation) : "-";
  return fmt::format("{}\t{:.2f} ({})", row.method, row.value, v);
}

std::string format_summary(std::vector<SummaryRow> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SummaryRow& a, const SummaryRow& b) { return a.method < b.method; });
  std::string out;
  for (const auto& r : rows) out += format_summary_row(r) + '\n';
  return out;
}

std::optional<std::string> check_run_log(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kLogHeader) return "bad or missing header";
  int lineno = 1;
  int rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, '\t')) f.push_back(item);
    if (f.size() != 6) return fmt::format("line {}: expected 6 fields", lineno);
    for (const auto& x : f) {
      if (!is_number_list(x)) return fmt::format("line {}: bad value '{}'", lineno, x);
    }
    ++rows;
  }
  if (rows == 0) return "no snapshot lines";
  return std::nullopt;
}

}  // namespace pairfair
