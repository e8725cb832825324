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

#include "haarmix/algebra.hpp"
#include "haarmix/model.hpp"
#include "haarmix/types.hpp"

namespace haarmix {

/// Permutation of {0, .., q-1} in image form: sigma[i] = image of i.
using Permutation = std::vector<int>;

/// All permutations of q symbols in lexicographic order. This ordering is
/// part of the persisted-output contract.
std::vector<Permutation> all_permutations(int q);

Permutation compose(const Permutation& a, const Permutation& b);  // a after b
Permutation inverse(const Permutation& a);
int cycle_count(const Permutation& a);

/// Unitary representation of sigma on (C^d)^{x q}: maps basis index
/// (i_1 .. i_q) to (i_{sigma^-1(1)} .. i_{sigma^-1(q)}), so that
/// P_pi P_sigma = P_{pi sigma}.
struct PermutationOperator {
  Permutation sigma;
  Index d = 0;
  CMatrix matrix;
};

PermutationOperator permutation_operator(const Permutation& sigma, Index d, int q);

/// Gram matrix M_{sigma pi} = d^{cycles(sigma^-1 pi)} = tr(P_sigma^dag P_pi)
/// of the permutation operators, in lexicographic order.
RMatrix gram_matrix(Index d, int q);

/// Eigenvalue-thresholded pseudo-inverse of the (possibly singular, when
/// d < q) Gram matrix.
RMatrix gram_pinv(const RMatrix& m, double threshold = NumericPolicy::defaults().pinv_threshold);

/// Generator of the q-copy semigroup in vectorized form,
///   -i (H^{(+)q})o - (sigma/2) ((V^{(+)q})o)^2,
/// with Xo = X x I - I x X^T. Above the dense cap only the matrix-free
/// action (through Hq/Vq) is available.
struct LiouvilleanQ {
  SystemSpec sys;
  int q = 1;
  Index copy_dim = 0;   // d^q
  bool dense = true;    // matrix holds the vectorized generator
  CMatrix matrix;       // d^{2q} x d^{2q} when dense
  CMatrix Hq, Vq;       // q-copy operators, kept for the matrix-free action

  Index super_dim() const { return copy_dim * copy_dim; }

  /// Action on a vectorized operator; works in both dense and matrix-free
  /// form.
  CVector apply(const CVector& x) const;
};

LiouvilleanQ build_liouvillean(const SystemSpec& sys, int q,
                               const NumericPolicy& policy = NumericPolicy::defaults());

/// Splits the generator into single-copy terms and the noise-induced
/// cross-copy interaction -(sigma/2) sum_{k != l} Vo_k Vo_l. The two parts
/// sum back to the full matrix.
std::pair<CMatrix, CMatrix> local_decomposition(const LiouvilleanQ& lq);

/// Exact twirl sum_{pi,sigma} (M^+)_{pi sigma} tr(P_sigma^dag rho0) P_pi over
/// the unitary group.
CMatrix haar_twirl(const CMatrix& rho0, Index d, int q);

/// The twirl as a projector on the vectorized q-copy space: the t -> infinity
/// limit of the semigroup. Idempotent and self-adjoint.
struct HaarProjector {
  Index d = 0;
  int q = 1;
  RMatrix gram;
  RMatrix gram_pinverse;
  CMatrix projector;  // materialized only when d^{2q} fits the dense cap

  CVector apply(const CVector& x) const;

 private:
  friend HaarProjector haar_projector(Index, int, const NumericPolicy&);
  std::vector<CVector> perm_vecs_;  // vec(P_pi), lexicographic order
};

HaarProjector haar_projector(Index d, int q,
                             const NumericPolicy& policy = NumericPolicy::defaults());

/// Tensor product of per-copy superoperators (each d^2 x d^2), reindexed to
/// the q-copy vectorized layout (row block = kets of all copies, column block
/// = bras of all copies).
CMatrix lifted_superop_product(const std::vector<CMatrix>& factors, Index d);

/// Eigenprojection of the q-copy generator built from single-copy data:
/// steady projector on every copy except copy j (1-based), which carries the
/// i-th eigenprojection cluster of the single-copy generator.
CMatrix lifted_eigenprojection(const Spectrum& single_copy, int i, int j, int q,
                               const NumericPolicy& policy = NumericPolicy::defaults());

/// Distinct-eigenvalue clusters of a single-copy spectrum with their
/// eigenvalues, ordered by decreasing real part (cluster 0 = steady space).
std::vector<std::pair<Complex, CMatrix>> eigenprojection_clusters(
    const Spectrum& s, const NumericPolicy& policy = NumericPolicy::defaults());

}  // namespace haarmix
