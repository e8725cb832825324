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

#include <string>
#include <vector>

#include "haarmix/algebra.hpp"
#include "haarmix/types.hpp"

namespace haarmix {

/// A driven system: drift Hamiltonian H, control operator V and white-noise
/// strength sigma of the control signal.
struct SystemSpec {
  CMatrix H;
  CMatrix V;
  double sigma = 0.0;
  Index dim = 0;

  static SystemSpec make(CMatrix H, CMatrix V, double sigma);
};

/// Nearest-neighbour hopping chain of `length` sites with the control acting
/// on site `control_site` (1-based).
struct ChainSpec {
  int length = 2;
  int control_site = 1;

  void validate() const;
};

SystemSpec chain_system(const ChainSpec& spec, double sigma);

/// The chain is fully controllable iff control_site and length+1 are co-prime.
bool is_coprime_controllable(const ChainSpec& spec);

/// Dimension of the real Lie algebra generated by iH, iV under nested
/// commutators (traceless part). Full controllability iff the result equals
/// dim^2 - 1.
int lie_algebra_dimension(const SystemSpec& sys, double tol = 1e-9, Index dim_cap = 12);

/// Dimension of {X : [H^{(+)q}, X] = [V^{(+)q}, X] = 0} via the null space of
/// the stacked commutator superoperators. Controllable systems give exactly 2
/// at q = 2 (identity and swap).
int commutant_dimension(const SystemSpec& sys, int q,
                        const NumericPolicy& policy = NumericPolicy::defaults());

/// Orthonormal basis of solutions of Q H^T + H Q = 0 and Q V^T + V Q = 0.
/// An empty list certifies the necessary condition for controllability; a
/// non-empty one exhibits a conserved pairing at two copies.
std::vector<CMatrix> symmetry_obstruction(const SystemSpec& sys);

/// Two-spin system H = sx sx + sy sy + sx(1) + eps * sz sz, V = sy(1). At
/// eps = 0 an extra two-copy symmetry makes it uncontrollable; small eps
/// restores controllability with a parametrically small two-copy gap.
SystemSpec counterexample_system(double eps, double sigma);

/// Single-site Pauli ('I','X','Y','Z').
CMatrix pauli_matrix(char which);

/// Tensor product of single-site Paulis, e.g. "XY" = sx x sy.
CMatrix pauli_string(const std::string& ops);

/// Real combination sum_i coeff_i * pauli_string(ops_i).
CMatrix pauli_sum(const std::vector<std::pair<double, std::string>>& terms);

/// Parses "1.0 XX + 1.0 YY - 0.5 ZI" into a matrix.
CMatrix parse_pauli_sum(const std::string& text);

}  // namespace haarmix
