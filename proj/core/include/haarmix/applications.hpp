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

#include <vector>

#include "haarmix/model.hpp"
#include "haarmix/types.hpp"

namespace haarmix {

/// Ryser evaluation, O(2^q q). q <= 20.
Complex permanent(const CMatrix& m);

/// Bound e * ||K||_1 on |tr[(E_U - E_Haar) K]| for any contraction K.
double moment_error_bound(double expander_distance, double k_trace_norm);

/// Index contraction tr[U^{x q,q} K] for structured K without materializing
/// the q-copy tensor.
struct ContractionSpec {
  enum class Kind { kBosonSampling, kMultipoint, kXy };
  Kind kind = Kind::kMultipoint;
  int q = 1;
  std::vector<Index> rows;     // boson sampling: output modes (duplicates allowed)
  std::vector<Index> cols;     // boson sampling: input modes
  std::vector<Index> dagger_sites;  // multipoint: i_1..i_q of the a^dag factors
  std::vector<Index> plain_sites;   // multipoint: j_1..j_q of the a factors
  CMatrix initial_correlations;     // <a_i^dag a_j> at t = 0
  bool fermionic = false;
  Index site_i = 0, site_j = 0;  // xy: spin sites
  char op_i = 'x', op_j = 'x';   // xy: 'x' or 'y'
  double k_norm_override = 0.0;  // user-supplied ||K||_1 (required for xy)

  /// Trace norm of the structured contraction operator.
  double trace_norm() const;
};

/// Evaluates tr[U^{x q,q} K]: |per(submatrix)|^2 for boson sampling, the
/// Wick-contracted 2q-point function for multipoint, the Majorana Pfaffian
/// for the xy spin correlator.
Complex multipoint_correlator(const CMatrix& u, const ContractionSpec& spec);

/// Dense d^{2q} x d^{2q} form of the contraction operator (test-scale only).
CMatrix contraction_operator_dense(const ContractionSpec& spec, Index d);

/// Pfaffian of an even antisymmetric matrix by skew elimination.
Complex pfaffian(const CMatrix& a);

struct ControlTimeEstimate {
  double t_star_min = 0.0;
  double sigma_argmin = 0.0;
  std::vector<double> sigmas;
  std::vector<double> t_star;  // 1/lambda_star per grid point
};

/// Minimizes the inverse gap of the edge-controlled chain over a noise grid.
ControlTimeEstimate control_time_estimate(int length, const std::vector<double>& sigma_grid,
                                          const NumericPolicy& policy = NumericPolicy::defaults());

}  // namespace haarmix
