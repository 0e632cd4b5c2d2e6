// Copyright 2026 The medpir Authors
//
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

#ifndef MEDPIR_COMMON_HPP_
#define MEDPIR_COMMON_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace medpir {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ColVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Base for all errors raised by the library. The CLI maps subclasses to
/// exit codes (config 2, missing prerequisite 3, numerical failure 4).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Malformed or invalid input data (bad JSONL line, unknown category, ...).
struct ParseError : Error {
  using Error::Error;
};

struct MissingArtifactError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

}  // namespace medpir

#endif  // MEDPIR_COMMON_HPP_
