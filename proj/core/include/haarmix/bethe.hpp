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

#include <optional>
#include <string>
#include <vector>

#include "haarmix/types.hpp"

namespace haarmix {

/// Central-coupling Richardson-Gaudin data of the strongly driven chain:
/// g_k = (2/L) sin^2(pi k/L), k = 1..L-1, plus the noise strength that sets
/// the overall 1/sigma scale of all eigenvalues.
struct GaudinCouplings {
  int L = 0;
  std::vector<double> g;
  double sigma = 1.0;
};

GaudinCouplings make_gaudin_couplings(int length, double sigma);

enum class BetheAlgebra { kSu11, kSu2, kSu2q };

/// Unpaired-particle occupations per mode (k = 1..L-1) and the number of
/// pairs. Modes never hold both species at once; pair number follows from
/// the copy count via N = q - sum_k n_k / 2.
struct ExcitationPattern {
  std::vector<int> n_up;
  std::vector<int> n_down;
  int pairs = 0;

  int total(std::size_t k) const { return n_up[k] + n_down[k]; }
  int total_unpaired() const;
  void validate(BetheAlgebra algebra, int L, int q) const;
};

/// Pole/weight data of the nested Bethe equations. Level j = 1..2q-1; pole 0
/// sits at z = 0 with weight delta_{j,q}, pole k at z_k = 2/g_k with the
/// highest-weight occupation weights. Coincident poles (g_k = g_{L-k}) are
/// merged by the solver, not here.
struct BetheProblem {
  GaudinCouplings couplings;
  int q = 1;
  int levels = 1;                     // 2q - 1
  std::vector<double> z;              // size L: z[0] = 0, z[k] = 2/g_k
  Eigen::MatrixXi mu;                 // L x levels, entries in {0, 1}
  RMatrix cartan;                     // tridiagonal (2, -1)
  ExcitationPattern pattern;
};

BetheProblem build_su2q_problem(const GaudinCouplings& c, int q, const ExcitationPattern& pattern);

/// Real root configuration solving the Bethe equations, with the residual of
/// every equation at the returned point.
struct BetheRoots {
  std::vector<std::vector<double>> omega;  // per level
  std::vector<double> residuals;           // flattened, same order as omega
  int iterations = 0;

  double max_residual() const;
};

struct BetheSolution {
  BetheRoots roots;
  double eigenvalue = 0.0;
};

/// Interval layout for root seeding: number of roots placed between each
/// consecutive pair of confining poles (per level for the nested case).
using RootLayout = std::vector<int>;

/// Fully symmetric (bosonic) sector. `nonzero_roots` pair rapidities are
/// solved for; the remaining pairs sit at the always-admissible zero root.
/// The eigenvalue is -(2/sigma)(sum_k g_k n_k + 4 sum_a E_a), E_a = 1/w_a.
BetheSolution solve_su11(const GaudinCouplings& c, const ExcitationPattern& pattern,
                         int nonzero_roots, const std::optional<RootLayout>& layout = std::nullopt);

/// Fully antisymmetric (fermionic) sector, Pauli-limited occupations.
BetheSolution solve_su2(const GaudinCouplings& c, const ExcitationPattern& pattern,
                        int nonzero_roots, const std::optional<RootLayout>& layout = std::nullopt);

/// General representation: nested equations over 2q-1 levels; only level-q
/// roots enter the eigenvalue.
BetheSolution solve_su2q(const BetheProblem& problem, const std::vector<int>& root_counts,
                         const std::vector<std::optional<RootLayout>>& layouts = {});

/// Gradient-flow relaxation of the electrostatic energy whose stationary
/// points are the Bethe roots; independent fallback/verifier for the Newton
/// path. Seeds must lie strictly inside inter-pole gaps.
BetheRoots electrostatic_relax(const BetheProblem& problem, const std::vector<int>& root_counts,
                               const std::vector<std::vector<double>>& seeds);

/// Electrostatic energy along the real line; its gradient components equal
/// the Bethe residuals up to sign. The algebra-tagged overload covers the
/// single-level sectors.
double electrostatic_energy(const BetheProblem& problem,
                            const std::vector<std::vector<double>>& omega);
std::vector<double> electrostatic_gradient(const BetheProblem& problem,
                                           const std::vector<std::vector<double>>& omega);
double electrostatic_energy(BetheAlgebra algebra, const GaudinCouplings& c,
                            const ExcitationPattern& pattern, const std::vector<double>& omega);
std::vector<double> electrostatic_gradient(BetheAlgebra algebra, const GaudinCouplings& c,
                                           const ExcitationPattern& pattern,
                                           const std::vector<double>& omega);

/// Closed-form strong-driving gap (8/(sigma L)) sin^2(pi/L); L > 2 required,
/// independent of the copy number by construction.
double gap_certificate(int length, double sigma);

/// Enumerates admissible patterns and root configurations (capped at
/// sum n <= 4, pairs N <= 2), solves them, and reports the eigenvalue list
/// and the minimal non-zero magnitude.
struct GapSearchResult {
  std::vector<double> eigenvalues;
  double min_gap = 0.0;
  bool monotonicity_flag = false;  // |lambda| failed to grow with added excitations
};

GapSearchResult enumerate_gap(BetheAlgebra algebra, int length, int q, double sigma);

/// Admissible patterns for the algebra with the enumeration caps above.
std::vector<ExcitationPattern> enumerate_patterns(BetheAlgebra algebra, int length, int q,
                                                  int max_unpaired = 4, int max_pairs = 2);

}  // namespace haarmix
