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

#include "haarmix/types.hpp"

namespace haarmix {

/// Eigendecomposition of a (generally non-normal) matrix with biorthonormal
/// left/right eigenvector pairs: A = sum_j lambda_j R_j L_j^dag with
/// tr(L_j^dag R_k) = delta_jk. Columns are sorted by decreasing real part of
/// the eigenvalue (ties broken by decreasing imaginary part).
struct Spectrum {
  CVector eigenvalues;
  CMatrix right;  // columns R_j
  CMatrix left;   // columns L_j
  double biorth_residual = 0.0;

  Index size() const { return eigenvalues.size(); }
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Kronecker sum A (+) B = A x I + I x B.
CMatrix kron_sum(const CMatrix& a, const CMatrix& b);

/// q-fold Kronecker sum X^{(+)q} = sum_k I^{x(k-1)} x X x I^{x(q-k)},
/// dimension d^q. Throws DimensionError once d^q exceeds `cap`.
CMatrix kron_sum_power(const CMatrix& x, int q, Index cap = NumericPolicy::defaults().dense_cap);

/// Number of rows of X^{(+)q}; throws DimensionError when d^q > cap.
Index tensor_power_dim(Index d, int q, Index cap);

/// Row-major vectorization |X>> with component (i*cols + j) = X_ij, so that
/// |A X B>> = (A x B^T)|X>>.
CVector vec(const CMatrix& x);
CMatrix unvec(const CVector& v);

/// Commutator superoperator: X x I - I x X^T acting on row-major vec, i.e.
/// the matrix form of [X, .].
CMatrix commutator_super(const CMatrix& x);

/// Matrix exponential (scaling-and-squaring with a Pade kernel).
CMatrix expm(const CMatrix& a);

/// Biorthonormal eigendecomposition. Near-degenerate clusters (spacing below
/// cluster_tol_factor * spectral scale) are re-biorthonormalized by a small
/// dense solve; Jordan structure beyond `tol` raises DefectiveSpectrumError.
Spectrum eig_biorthonormal(const CMatrix& a, double tol = NumericPolicy::defaults().biorth_tol,
                           const NumericPolicy& policy = NumericPolicy::defaults());

/// Eigenvalues only (same ordering convention as Spectrum).
CVector eigenvalues_only(const CMatrix& a);

std::vector<double> singular_values(const CMatrix& a);

/// Orthonormal basis of the (numerical) null space: ||A n_k|| <= tol.
CMatrix null_space(const CMatrix& a, double tol);

/// Largest singular value.
double operator_norm(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double rel_tol = 1e-12);

/// Groups already-sorted eigenvalues into clusters of mutual distance below
/// `tol`; returns the list of index groups (order preserved).
std::vector<std::vector<Index>> eigenvalue_clusters(const CVector& values, double tol);

}  // namespace haarmix
