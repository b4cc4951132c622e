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

#ifndef PAIRFAIR_CONFIG_HPP_
#define PAIRFAIR_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "pairfair/dataset.hpp"
#include "pairfair/metrics.hpp"
#include "pairfair/model.hpp"
#include "pairfair/solver.hpp"

namespace pairfair {

// Flat `key=value` text; `#` starts a comment. Duplicate keys are an error.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::filesystem::path& path);

struct DataConfig {
  std::optional<std::filesystem::path> path;
  std::optional<std::string> simulate;  // generator name
  int queries = 5000;
  std::uint64_t seed = 0;
  CsvSchema schema;
};

struct RunConfig {
  DataConfig data;
  std::uint64_t split_seed = 0;
  ModelSpec model;  // input_dim filled in once the data is loaded
  Method method = Method::kUnconstrained;
  std::optional<FairnessSpec> fairness;
  SolverConfig solver;
  std::filesystem::path output_dir = "out";
};

// Throws ConfigError listing every unknown key by name. Relative data paths
// are resolved against `base`.
RunConfig parse_run_config(const KeyValues& kv, const std::filesystem::path& base = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Loads or generates the data and applies the seeded split.
Dataset load_data(const RunConfig& cfg);

// Checks the criterion against the data's protection; throws ConfigError.
void check_compatible(const RunConfig& cfg, const Dataset& dataset);

}  // namespace pairfair

#endif  // PAIRFAIR_CONFIG_HPP_
