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

#ifndef PAIRFAIR_ERRORS_HPP_
#define PAIRFAIR_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pairfair {

// Invalid user configuration (unknown keys, incompatible criterion, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unusable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical routine failed to reach its stated tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pairfair

#endif  // PAIRFAIR_ERRORS_HPP_
