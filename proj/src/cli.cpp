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

#include "pairfair/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pairfair/config.hpp"
#include "pairfair/errors.hpp"
#include "pairfair/report.hpp"
#include "pairfair/simgen.hpp"
#include "pairfair/solver.hpp"

namespace pairfair {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path);
  if (!f) throw DataError(fmt::format("cannot write {}", path.string()));
  f.exceptions(std::ios::badbit | std::ios::failbit);
  return f;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot read {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_model_file(const fs::path& path, const StochasticModel& sm) {
  auto f = open_out(path);
  if (sm.size() == 1) {
    write_model(f, sm.models[0]);
  } else {
    write_stochastic_model(f, sm);
  }
}

StochasticModel read_model_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot read model {}", path.string()));
  return read_stochastic_model(in);
}

std::vector<std::string> csv_header(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) {
    throw DataError(fmt::format("cannot read header of {}", path.string()));
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) cols.push_back(c);
  return cols;
}

std::vector<double> csv_column(const fs::path& path, const std::string& name) {
  const auto header = csv_header(path);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError(fmt::format("no column '{}'", name));
  const std::size_t col = static_cast<std::size_t>(it - header.begin());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string v;
    for (std::size_t k = 0; k <= col; ++k) {
      if (!std::getline(ss, v, ',')) {
        throw DataError(fmt::format("line {}: missing column '{}'", lineno, name));
      }
    }
    try {
      out.push_back(std::stod(v));
    } catch (const std::exception&) {
      throw DataError(fmt::format("line {}: bad score '{}'", lineno, v));
    }
  }
  return out;
}

std::optional<SplitTag> parse_split_flag(const std::string& s) {
  if (s == "all") return std::nullopt;
  try {
    return parse_split_tag(s);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("unknown split '{}'", s));
  }
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& generator, int queries, std::uint64_t seed,
                 const fs::path& out_path, std::ostream& out) {
  if (generator != "two_group" && generator != "three_group") {
    throw ConfigError(fmt::format("unknown generator '{}'", generator));
  }
  if (queries < 1) throw ConfigError("--queries must be >= 1");
  const Dataset ds = simgen::generate(generator, queries, seed);
  {
    auto probe = open_out(out_path);
  }
  write_csv(ds, out_path);
  auto meta = open_out(fs::path(out_path.string() + ".meta"));
  meta << "generator=" << generator << '\n'
       << "seed=" << seed << '\n'
       << "queries=" << queries << '\n'
       << "rows=" << ds.size() << '\n'
       << "groups=" << ds.protection().num_groups << '\n';
  out << fmt::format("wrote {} rows to {}\n", ds.size(), out_path.string());
  return kExitOk;
}

json train_summary(const RunConfig& cfg, const TrainResult& tr, const Dataset& ds) {
  const RunResult& run = tr.best();
  const Evaluator test(ds, SplitTag::kTest, evaluation_options(cfg.solver));
  json j;
  j["method"] = to_string(tr.method);
  if (tr.fairness) {
    j["criterion"] = to_string(tr.fairness->criterion);
    j["epsilon"] = tr.fairness->epsilon;
  } else {
    j["criterion"] = nullptr;
  }
  j["task"] = to_string(ds.task());
  j["step"] = run.step;
  j["atoms"] = run.model.size();
  j["constraints"] = tr.constraint_names;
  j["shrink_fallback"] = run.shrink_fallback;
  j["warnings"] = run.warnings;
  j["validation"] = stochastic_json(run.validation, run.model.probabilities);
  j["test"] = stochastic_json(evaluate_stochastic(run.model, test), run.model.probabilities);
  json grid = json::array();
  for (const RunResult& r : tr.runs) {
    grid.push_back({{"step", r.step},
                    {"validation_objective", r.validation_objective},
                    {"validation_violation",
                     r.validation_violation ? json(*r.validation_violation) : json(nullptr)},
                    {"robust_objective", r.robust_objective},
                    {"shrink_fallback", r.shrink_fallback}});
  }
  j["grid"] = grid;
  return j;
}

int cmd_train(const fs::path& config_path, std::optional<std::uint64_t> seed,
              std::optional<fs::path> out_dir, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_run_config(config_path);
  if (seed) cfg.solver.seed = *seed;
  if (out_dir) cfg.output_dir = *out_dir;
  const Dataset ds = load_data(cfg);
  check_compatible(cfg, ds);
  cfg.model.input_dim = ds.dim();

  const TrainResult tr = train(cfg.method, ds, cfg.model, cfg.fairness, cfg.solver);
  const RunResult& run = tr.best();

  fs::create_directories(cfg.output_dir);
  write_model_file(cfg.output_dir / "model.txt", run.model);
  {
    auto f = open_out(cfg.output_dir / "runlog.tsv");
    write_run_log(f, tr);
  }
  {
    auto f = open_out(cfg.output_dir / "hyperparameters.txt");
    f << "method=" << to_string(tr.method) << '\n'
      << "solver.step=" << fmt::format("{}", run.step) << '\n'
      << "solver.lambda_step=" << fmt::format("{}", run.step * cfg.solver.lambda_step_ratio)
      << '\n'
      << "solver.iterations=" << cfg.solver.iterations << '\n'
      << "solver.seed=" << cfg.solver.seed << '\n';
  }
  {
    auto f = open_out(cfg.output_dir / "summary.json");
    f << train_summary(cfg, tr, ds).dump(2) << '\n';
  }
  for (const auto& w : run.warnings) err << "warning: " << w << '\n';
  out << fmt::format("{}: step {} with {} atom(s); validation objective {:.6f}\n",
                     to_string(tr.method), run.step, run.model.size(),
                     run.validation_objective);
  return run.shrink_fallback ? kExitFallback : kExitOk;
}

int cmd_evaluate(const fs::path& config_path, const std::optional<fs::path>& model_path,
                 const std::string& split_name, const std::optional<std::string>& score_column,
                 const std::optional<fs::path>& out_path, std::ostream& out,
                 std::ostream& err) {
  RunConfig cfg = load_run_config(config_path);
  const std::optional<SplitTag> tag = parse_split_flag(split_name);
  if (score_column && !cfg.data.path) {
    throw ConfigError("--score-column needs a CSV data.path");
  }
  if (score_column && cfg.data.schema.feature_columns.empty()) {
    // Keep the debug column out of the features.
    const CsvSchema& s = cfg.data.schema;
    std::set<std::string> roles = {s.label_column, *score_column};
    for (const auto& c : {s.query_column, s.group_column, s.attribute_column}) {
      if (c) roles.insert(*c);
    }
    for (const auto& c : csv_header(*cfg.data.path)) {
      if (!roles.count(c)) cfg.data.schema.feature_columns.push_back(c);
    }
  }
  const Dataset ds = load_data(cfg);
  check_compatible(cfg, ds);
  const Evaluator ev(ds, tag, evaluation_options(cfg.solver));

  json report;
  std::string rendering;
  if (score_column) {
    const std::vector<double> scores = csv_column(*cfg.data.path, *score_column);
    if (scores.size() != ds.size()) throw DataError("score column length mismatch");
    const Evaluation e = ev.evaluate(scores);
    report = evaluation_json(e);
    rendering = render_evaluation(e);
  } else {
    const fs::path mp = model_path.value_or(cfg.output_dir / "model.txt");
    const StochasticModel sm = read_model_file(mp);
    for (const Model& m : sm.models) {
      if (m.spec().input_dim != ds.dim()) {
        throw DataError(fmt::format("model expects {} features, dataset has {}",
                                    m.spec().input_dim, ds.dim()));
      }
    }
    const StochasticEvaluation se = evaluate_stochastic(sm, ev);
    report = stochastic_json(se, sm.probabilities);
    rendering = render_evaluation(se.expected);
  }
  report["split"] = split_name;
  if (out_path) {
    auto f = open_out(*out_path);
    f << report.dump(2) << '\n';
    out << rendering;
  } else {
    out << report.dump(2) << '\n';
    err << rendering;
  }
  return kExitOk;
}

std::vector<fs::path> run_dirs(const fs::path& dir) {
  std::vector<fs::path> dirs;
  if (fs::exists(dir / "summary.json")) dirs.push_back(dir);
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_directory() && fs::exists(e.path() / "summary.json")) dirs.push_back(e.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

int cmd_report(const fs::path& dir, std::ostream& out) {
  if (!fs::is_directory(dir)) throw DataError(fmt::format("no directory {}", dir.string()));
  const auto dirs = run_dirs(dir);
  if (dirs.empty()) throw DataError(fmt::format("no completed runs under {}", dir.string()));
  std::vector<SummaryRow> rows;
  bool malformed = false;
  for (const auto& d : dirs) {
    SummaryRow row;
    row.method = d.filename().string();
    try {
      const json j = json::parse(slurp(d / "summary.json"));
      row.method = j.at("method").get<std::string>();
      const json& t = j.at("test").at("expected");
      const bool regression = j.at("task").get<std::string>() == "regression";
      const json& v = regression ? t.at("mse") : t.at("auc");
      if (v.is_null()) throw DataError("objective undefined");
      row.value = v.get<double>();
      if (!j.at("criterion").is_null()) {
        const json& viol = t.at("violations").at(j.at("criterion").get<std::string>());
        if (!viol.is_null()) row.violation = viol.get<double>();
      }
      if (auto problem = check_run_log(slurp(d / "runlog.tsv"))) {
        row.problem = "runlog.tsv: " + *problem;
      }
    } catch (const std::exception& e) {
      row.problem = e.what();
    }
    malformed = malformed || row.problem.has_value();
    rows.push_back(row);
  }
  out << format_summary(rows);
  return malformed ? kExitData : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pairwise fairness for ranking and regression"};
  app.require_subcommand(1);

  std::string generator;
  int queries = 5000;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "Generate a simulated ranking dataset");
  sim->add_option("generator", generator, "two_group or three_group")->required();
  sim->add_option("--queries", queries, "Number of queries");
  sim->add_option("--seed", sim_seed, "Random seed");
  sim->add_option("--out", sim_out, "Output CSV path")->required();

  std::string config;
  std::optional<std::uint64_t> train_seed;
  std::optional<std::string> train_out;
  auto* tr = app.add_subcommand("train", "Train a model from a config file");
  tr->add_option("--config", config, "Config file")->required();
  tr->add_option("--seed", train_seed, "Override solver.seed");
  tr->add_option("--out", train_out, "Override output.dir");

  std::optional<std::string> model_path;
  std::string split_name = "test";
  std::optional<std::string> score_column;
  std::optional<std::string> eval_out;
  auto* ev = app.add_subcommand("evaluate", "Evaluate a saved model");
  ev->add_option("--config", config, "Config file")->required();
  ev->add_option("--model", model_path, "Model file (default <output.dir>/model.txt)");
  ev->add_option("--split", split_name, "train, validation, test or all");
  ev->add_option("--score-column", score_column, "Debug: evaluate a CSV score column");
  ev->add_option("--out", eval_out, "Write the JSON report here");

  std::string run_dir;
  auto* rep = app.add_subcommand("report", "Summarize completed runs");
  rep->add_option("dir", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(generator, queries, sim_seed, sim_out, out);
    if (tr->parsed()) {
      std::optional<fs::path> o;
      if (train_out) o = *train_out;
      return cmd_train(config, train_seed, o, out, err);
    }
    if (ev->parsed()) {
      std::optional<fs::path> mp, op;
      if (model_path) mp = *model_path;
      if (eval_out) op = *eval_out;
      return cmd_evaluate(config, mp, split_name, score_column, op, out, err);
    }
    if (rep->parsed()) return cmd_report(run_dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace pairfair
