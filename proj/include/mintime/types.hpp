// Copyright 2026 The mintime Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MINTIME_TYPES_HPP_
#define MINTIME_TYPES_HPP_

#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mintime {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error taxonomy. The CLI maps each family onto a distinct exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverBudgetError : public std::runtime_error {
 public:
  SolverBudgetError(const std::string& what, double residual, int sweeps)
      : std::runtime_error(what), residual_(residual), sweeps_(sweeps) {}
  double residual() const { return residual_; }
  int sweeps() const { return sweeps_; }

 private:
  double residual_;
  int sweeps_;
};

class InsufficientSamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateCostateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CostateCollapseError : public std::runtime_error {
 public:
  CostateCollapseError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

inline void require_dimension(long n) {
  if (n < 1 || n > 3) {
    throw ConfigError("dimension must be 1, 2 or 3, got " + std::to_string(n));
  }
}

}  // namespace mintime

#endif  // MINTIME_TYPES_HPP_
