// Copyright 2026 The htm Authors.
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace htm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

using ActionSeq = std::vector<int>;

/// Background action index, named "SIL".
inline constexpr int kBackground = 0;
inline constexpr const char* kBackgroundName = "SIL";

/// Raised for malformed or inconsistent input data (files, corpora, shapes).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid configuration keys or values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal diagnostics are appended here by operations that accept a sink.
using Diagnostics = std::vector<std::string>;

inline void diag(Diagnostics* sink, std::string msg) {
  if (sink != nullptr) sink->push_back(std::move(msg));
}

}  // namespace htm
