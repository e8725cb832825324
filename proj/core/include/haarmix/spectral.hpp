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

#include <utility>
#include <vector>

#include "haarmix/liouville.hpp"
#include "haarmix/types.hpp"

namespace haarmix {

/// Eigenvalue census of a generator. lambda_star is the smallest |Re| among
/// eigenvalues with |Re| above zero_tol; steady_dim counts |lambda| <=
/// zero_tol. kappa is the 2-norm condition number of the unit-column right
/// eigenvector matrix (infinite when the spectrum is defective).
struct GapReport {
  double lambda_star = 0.0;
  Index steady_dim = 0;
  CVector eigenvalues;
  double kappa = 1.0;
  double zero_tol = 0.0;
  bool defective = false;
};

/// zero_tol <= 0 selects the default 1e-9 * spectral radius.
GapReport spectral_gap(const CMatrix& generator, double zero_tol = 0.0,
                       const NumericPolicy& policy = NumericPolicy::defaults());
GapReport spectral_gap(const LiouvilleanQ& lq, double zero_tol = 0.0,
                       const NumericPolicy& policy = NumericPolicy::defaults());

/// Singular-value gap of exp(t L): s_star is the largest singular value after
/// excluding the steady block; delta = |lambda_star + log(s_star)/t| /
/// lambda_star measures its distance from the spectral prediction.
struct SingularGap {
  double s_star = 0.0;
  double delta = 0.0;
};

SingularGap singular_gap(const LiouvilleanQ& lq, double t,
                         const NumericPolicy& policy = NumericPolicy::defaults());

struct MixingEstimate {
  double t_upper = 0.0;
  double t_lower = 0.0;
  int q = 1;
  Index d = 0;
};

/// t_upper = (4 q log d + 2 log kappa)/lambda_star; t_lower = q/lambda_star
/// (unit constant by convention).
MixingEstimate mixing_bounds(const GapReport& report, int q, Index d);

struct GapScanEntry {
  int q = 1;
  double lambda_star = 0.0;
};

struct GapScan {
  std::vector<GapScanEntry> entries;
  bool truncated = false;  // dense cap reached before q_max
};

GapScan gap_vs_q_scan(const SystemSpec& sys, int q_max,
                      const NumericPolicy& policy = NumericPolicy::defaults());

struct ScalingFit {
  double exponent = 0.0;
  double prefactor = 0.0;
};

/// Least-squares fit of log(lambda_star) against log(L) over a chain family.
ScalingFit gap_scaling_fit(const std::vector<ChainSpec>& family, double sigma,
                           const NumericPolicy& policy = NumericPolicy::defaults());

/// ||exp(t L) - U_inf||_inf, the operator-norm distance of the semigroup from
/// its infinite-time projector.
double expander_distance_semigroup(const LiouvilleanQ& lq, double t,
                                   const NumericPolicy& policy = NumericPolicy::defaults());

/// Matrix-free variant via power iteration with deflation of the steady
/// block; usable above the dense cap.
double expander_distance_power(const LiouvilleanQ& lq, double t,
                               const NumericPolicy& policy = NumericPolicy::defaults());

/// Smallest sigma for which the dense gap agrees with the strong-driving
/// closed form within 1% (bisection over sigma).
double sigma_strong_threshold(int chain_length,
                              const NumericPolicy& policy = NumericPolicy::defaults());

/// Krylov (Arnoldi) approximation of exp(t L) v for the matrix-free path.
CVector expm_multiply(const LiouvilleanQ& lq, double t, const CVector& v, int krylov_dim = 30,
                      double step_tol = 1e-10);

}  // namespace haarmix
