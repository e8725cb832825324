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

#include <cstdint>
#include <utility>
#include <vector>

#include "haarmix/liouville.hpp"
#include "haarmix/types.hpp"

namespace haarmix {

/// First-order reduction of the generator onto the kernel of its dissipator:
/// -i H_PP - (1/sigma) H_PQ D_QQ^{-1} H_QP, expressed in an orthonormal basis
/// of the kernel.
struct EffectiveLiouvillean {
  CMatrix matrix;
  Index projector_dim = 0;
  int order = 1;
  double sigma = 0.0;
  double coupling_norm = 0.0;   // ||D_QQ^{-1} H_QP|| / sigma, size of the block mixing
  bool sigma_warning = false;   // sigma < 10 ||H||: reduction may be inaccurate
};

EffectiveLiouvillean strong_effective(const SystemSpec& sys, int q,
                                      const NumericPolicy& policy = NumericPolicy::defaults());

/// Mode couplings g_k = (2/L) sin^2(pi k / L), k = 1..L-1, of the
/// strongly-driven chain in the Bogoliubov mode basis.
std::vector<double> gaudin_couplings(int length);

/// Representation sector for the secular strong-driving model: q particles of
/// each species over the chain modes, balanced at the controlled mode.
enum class SectorRep : std::uint8_t {
  kSymmetricBoson,      // single flavour, bosonic
  kAntisymmetricFermion,  // single flavour, fermionic
  kGeneralFermion,      // q flavours, fermionic
};

/// Dense Hermitian secular operator
///   -(2/sigma) sum_k g_k [ B^u_{0k}B^u_{k0} + B^u_{k0}B^u_{0k} (both spins)
///                          - 2 B^up_{0k}B^dn_{0k} - 2 B^up_{k0}B^dn_{k0} ]
/// assembled by explicit occupation enumeration in the requested sector.
struct SectorOperator {
  RMatrix matrix;            // real symmetric in the occupation basis
  Index dim = 0;
  int length = 0;
  int q = 1;
  SectorRep rep = SectorRep::kSymmetricBoson;
};

SectorOperator strong_chain_rwa_sector(int length, int q, double sigma, SectorRep rep);

/// Secular strong-driving model of the chain in the fully symmetric sector.
EffectiveLiouvillean strong_chain_rwa(int length, int q, double sigma);

/// Resonance-grouped secular dissipator at weak driving (q = 1): Hermitian
/// positive semidefinite blocks D^sec over index pairs sharing a Bohr
/// frequency. Generator eigenvalues are -i omega - delta with delta a block
/// eigenvalue.
struct RWABlock {
  double omega = 0.0;                       // common Bohr frequency of the block
  std::vector<std::pair<Index, Index>> pairs;  // (i, j) index pairs in order
  CMatrix matrix;                           // Hermitian PSD, includes the sigma factor
};

struct RWABlocks {
  std::vector<double> frequencies;  // omega_ij for every pair, pair-major order
  std::vector<RWABlock> blocks;
  double sigma = 0.0;
  double res_tol = 0.0;
  bool degenerate_flagged = false;  // H spectrum degenerate beyond res_tol

  /// Validity time scale of the secular approximation:
  /// max over non-resonant pairs of 1/|omega_ij - omega_kl|.
  double validity_time = 0.0;
};

RWABlocks weak_rwa(const SystemSpec& sys);

/// Smallest non-zero dissipation rate over all secular blocks.
double weak_gap(const SystemSpec& sys);

/// Closed-form weak-driving gap of the chain: the (1, conjugate-1) coherence
/// rate sigma (V_11 - V_11^2) with V_11 = (2/(L+1)) sin^2(pi/(L+1)). Scales
/// as 2 sigma pi^2 / L^3 for long chains.
double chain_weak_gap(int length, double sigma);

/// Non-zero solutions of the diagonal-sector secular equation
/// 1 = a^T (lambda + V^d)^{-1} a, found by bisection between consecutive
/// poles. All of them sit below -(2 sigma/(L+1)) sin^2(pi/(L+1)).
std::vector<double> weak_diagonal_solutions(int length, double sigma);

}  // namespace haarmix
