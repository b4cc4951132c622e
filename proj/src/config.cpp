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

#include "pairfair/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "pairfair/errors.hpp"
#include "pairfair/simgen.hpp"

namespace pairfair {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "data.path",          "data.simulate",      "data.queries",
      "data.seed",          "data.task",          "data.label",
      "data.query",         "data.group",         "data.attribute",
      "data.features",      "data.groups",        "split.seed",
      "model.kind",         "model.hidden",       "method",
      "fairness.criterion", "fairness.epsilon",   "solver.iterations",
      "solver.step_grid",   "solver.lambda_step_ratio", "solver.snapshots",
      "solver.seed",        "solver.minibatch",   "solver.max_pairs",
      "solver.initial_objective_weight",          "solver.selection_tolerance",
      "solver.threads",     "solver.adam.beta1",  "solver.adam.beta2",
      "solver.adam.epsilon", "output.dir",
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  std::optional<std::string> str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
  }

  template <typename T>
  std::optional<T> num(const std::string& key) const {
    auto s = str(key);
    if (!s) return std::nullopt;
    return parse<T>(key, *s);
  }

  template <typename T>
  static T parse(const std::string& key, const std::string& s) {
    T v{};
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) {
      throw ConfigError(fmt::format("{}: cannot parse '{}'", key, s));
    }
    return v;
  }

 private:
  const KeyValues& kv_;
};

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected key=value", lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", lineno));
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
      throw ConfigError(fmt::format("line {}: duplicate key {}", lineno, key));
    }
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

RunConfig parse_run_config(const KeyValues& kv, const std::filesystem::path& base) {
  std::vector<std::string> unknown;
  for (const auto& [k, v] : kv) {
    if (!known_keys().count(k)) unknown.push_back(k);
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("unknown config keys: " + list);
  }
  const Reader r(kv);
  RunConfig cfg;

  DataConfig& d = cfg.data;
  if (auto p = r.str("data.path")) {
    std::filesystem::path path(*p);
    d.path = path.is_relative() && !base.empty() ? base / path : path;
  }
  d.simulate = r.str("data.simulate");
  if (d.path.has_value() == d.simulate.has_value()) {
    throw ConfigError("exactly one of data.path and data.simulate is required");
  }
  if (d.simulate && *d.simulate != "two_group" && *d.simulate != "three_group") {
    throw ConfigError(fmt::format("data.simulate: unknown generator '{}'", *d.simulate));
  }
  d.queries = r.num<int>("data.queries").value_or(d.queries);
  if (d.queries < 1) throw ConfigError("data.queries must be >= 1");
  d.seed = r.num<std::uint64_t>("data.seed").value_or(0);
  CsvSchema& s = d.schema;
  if (auto t = r.str("data.task")) {
    try {
      s.task = parse_task(*t);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("data.task: unknown task '{}'", *t));
    }
  }
  s.label_column = r.str("data.label").value_or(s.label_column);
  s.query_column = r.str("data.query");
  s.group_column = r.str("data.group");
  s.attribute_column = r.str("data.attribute");
  if (auto f = r.str("data.features")) s.feature_columns = split_list(*f);
  s.num_groups = r.num<int>("data.groups").value_or(0);
  if (s.group_column && s.attribute_column) {
    throw ConfigError("data.group and data.attribute are mutually exclusive");
  }
  if (s.group_column && s.num_groups < 2) {
    throw ConfigError("data.groups must be >= 2 when data.group is set");
  }

  cfg.split_seed = r.num<std::uint64_t>("split.seed").value_or(0);

  const std::string kind = r.str("model.kind").value_or("linear");
  if (kind == "linear") {
    cfg.model = ModelSpec::linear(0);
  } else if (kind == "mlp") {
    const int h = r.num<int>("model.hidden").value_or(10);
    if (h < 1) throw ConfigError("model.hidden must be >= 1");
    cfg.model = ModelSpec::mlp(0, h);
  } else {
    throw ConfigError(fmt::format("model.kind: unknown kind '{}'", kind));
  }

  cfg.method = parse_method(r.str("method").value_or("unconstrained"));
  if (auto c = r.str("fairness.criterion")) {
    FairnessSpec f;
    f.criterion = parse_criterion(*c);
    f.epsilon = r.num<double>("fairness.epsilon").value_or(0.0);
    if (!(f.epsilon >= 0.0)) throw ConfigError("fairness.epsilon must be >= 0");
    cfg.fairness = f;
  } else if (kv.count("fairness.epsilon")) {
    throw ConfigError("fairness.epsilon given without fairness.criterion");
  }
  if ((cfg.method == Method::kConstrained || cfg.method == Method::kRobust) &&
      !cfg.fairness) {
    throw ConfigError("method " + to_string(cfg.method) + " needs fairness.criterion");
  }

  SolverConfig& sc = cfg.solver;
  sc.iterations = r.num<int>("solver.iterations").value_or(sc.iterations);
  if (auto g = r.str("solver.step_grid")) {
    sc.step_grid.clear();
    for (const auto& v : split_list(*g)) {
      sc.step_grid.push_back(Reader::parse<double>("solver.step_grid", v));
    }
  }
  sc.lambda_step_ratio = r.num<double>("solver.lambda_step_ratio").value_or(sc.lambda_step_ratio);
  sc.snapshots = r.num<int>("solver.snapshots").value_or(sc.snapshots);
  sc.seed = r.num<std::uint64_t>("solver.seed").value_or(sc.seed);
  if (auto b = r.num<int>("solver.minibatch")) sc.minibatch = *b;
  if (auto m = r.num<std::size_t>("solver.max_pairs")) sc.max_pairs = *m;
  sc.initial_objective_weight =
      r.num<double>("solver.initial_objective_weight").value_or(sc.initial_objective_weight);
  sc.selection_tolerance =
      r.num<double>("solver.selection_tolerance").value_or(sc.selection_tolerance);
  sc.threads = r.num<int>("solver.threads").value_or(sc.threads);
  sc.adam.beta1 = r.num<double>("solver.adam.beta1").value_or(sc.adam.beta1);
  sc.adam.beta2 = r.num<double>("solver.adam.beta2").value_or(sc.adam.beta2);
  sc.adam.epsilon = r.num<double>("solver.adam.epsilon").value_or(sc.adam.epsilon);
  sc.validate();

  if (auto o = r.str("output.dir")) cfg.output_dir = *o;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_key_values(path), path.parent_path());
}

Dataset load_data(const RunConfig& cfg) {
  if (cfg.data.simulate) {
    return split(simgen::generate(*cfg.data.simulate, cfg.data.queries, cfg.data.seed),
                 cfg.split_seed);
  }
  return split(load_csv(*cfg.data.path, cfg.data.schema), cfg.split_seed);
}

void check_compatible(const RunConfig& cfg, const Dataset& dataset) {
  if (cfg.method == Method::kDebiased &&
      (!dataset.protection().is_discrete() || dataset.protection().num_groups != 2)) {
    throw ConfigError("method debiased needs exactly two discrete groups");
  }
  if (cfg.fairness && !compatible(cfg.fairness->criterion, dataset.protection())) {
    throw ConfigError(fmt::format("criterion {} does not apply to this dataset's protection",
                                  to_string(cfg.fairness->criterion)));
  }
}

}  // namespace pairfair
