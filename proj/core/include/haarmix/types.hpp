// Copyright 2026 The haarmix Authors
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

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace haarmix {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Tolerances and size caps shared by the dense numerical kernels.
/// zero_tol-style thresholds are relative to the spectral scale of the
/// operator they are applied to.
struct NumericPolicy {
  double zero_tol_factor = 1e-9;
  double biorth_tol = 1e-8;
  double cluster_tol_factor = 1e-9;
  double pinv_threshold = 1e-10;
  Index dense_cap = 4096;
  bool deterministic = false;
  int max_power_iterations = 200;
  double power_tol = 1e-8;

  static const NumericPolicy& defaults();
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

/// Raised when an eigenproblem has (numerically) non-trivial Jordan
/// structure. Carries the indices of the offending eigenvalue cluster.
struct DefectiveSpectrumError : NumericalError {
  DefectiveSpectrumError(const std::string& what, std::vector<Index> cluster_indices)
      : NumericalError(what), cluster(std::move(cluster_indices)) {}
  std::vector<Index> cluster;
};

struct ConfigError : Error {
  ConfigError(const std::string& field, const std::string& what)
      : Error("config error at " + field + ": " + what), field_path(field) {}
  std::string field_path;
};

}  // namespace haarmix
