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

#ifndef PAIRFAIR_REPORT_HPP_
#define PAIRFAIR_REPORT_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pairfair/metrics.hpp"

namespace pairfair {

// Numbers are rounded to 6 decimal places; undefined values become null.
nlohmann::json evaluation_json(const Evaluation& eval);

// `expected` plus one entry per atom carrying its probability.
nlohmann::json stochastic_json(const StochasticEvaluation& eval,
                               std::span<const double> probabilities);

// Rows are groups of the better-labelled member, columns groups of the
// worse-labelled member.
std::string render_matrix(const PairwiseAccuracyMatrix& m);

// Human-readable block for a whole evaluation.
std::string render_evaluation(const Evaluation& eval);

struct SummaryRow {
  std::string method;
  double value = 0.0;  // test AUC, or test MSE for regression
  MaybeReal violation;
  std::optional<std::string> problem;  // set when the run is malformed
};

// "method\t0.92 (0.28)", or "method\tMALFORMED: <problem>".
std::string format_summary_row(const SummaryRow& row);

// Sorts by method name and formats one line per row.
std::string format_summary(std::vector<SummaryRow> rows);

// Checks a run log's header and each data line. Returns a description of the
// first problem, or nullopt when the log is well formed.
std::optional<std::string> check_run_log(const std::string& text);

}  // namespace pairfair

#endif  // PAIRFAIR_REPORT_HPP_
