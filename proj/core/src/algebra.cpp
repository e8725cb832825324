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

#include "haarmix/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace haarmix {

const NumericPolicy& NumericPolicy::defaults() {
  static const NumericPolicy policy{};
  return policy;
}

namespace {

void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(who) + ": square matrix required");
  }
}

void require_finite(const CMatrix& a, const char* who) {
  if (!a.allFinite()) {
    throw NumericalError(std::string(who) + ": non-finite entries");
  }
}

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

CMatrix kron_sum(const CMatrix& a, const CMatrix& b) {
  require_square(a, "kron_sum");
  require_square(b, "kron_sum");
  return kron(a, CMatrix::Identity(b.rows(), b.cols())) +
         kron(CMatrix::Identity(a.rows(), a.cols()), b);
}

Index tensor_power_dim(Index d, int q, Index cap) {
  if (q < 1) throw DimensionError("tensor_power_dim: q >= 1 required");
  Index dim = 1;
  for (int k = 0; k < q; ++k) {
    if (dim > cap / d) {
      throw DimensionError("tensor_power_dim: d^q exceeds dense cap");
    }
    dim *= d;
  }
  return dim;
}

CMatrix kron_sum_power(const CMatrix& x, int q, Index cap) {
  require_square(x, "kron_sum_power");
  const Index d = x.rows();
  tensor_power_dim(d, q, cap);
  CMatrix acc = x;
  for (int k = 2; k <= q; ++k) {
    const Index m = acc.rows();
    acc = kron(acc, CMatrix::Identity(d, d)) + kron(CMatrix::Identity(m, m), x);
  }
  return acc;
}

CVector vec(const CMatrix& x) {
  CVector v(x.size());
  Index p = 0;
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) v(p++) = x(i, j);
  return v;
}

CMatrix unvec(const CVector& v) {
  const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) {
    throw DimensionError("unvec: length is not a perfect square");
  }
  CMatrix x(n, n);
  Index p = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) x(i, j) = v(p++);
  return x;
}

CMatrix commutator_super(const CMatrix& x) {
  require_square(x, "commutator_super");
  const Index n = x.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  return kron(x, id) - kron(id, x.transpose());
}

CMatrix expm(const CMatrix& a) {
  require_square(a, "expm");
  require_finite(a, "expm");
  return a.exp();
}

CVector eigenvalues_only(const CMatrix& a) {
  require_square(a, "eigenvalues_only");
  require_finite(a, "eigenvalues_only");
  const Index n = a.rows();
  CMatrix work = a;
  CVector w(n);
  const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', static_cast<lapack_int>(n),
                                 work.data(), static_cast<lapack_int>(n), w.data(), nullptr, 1,
                                 nullptr, 1);
  if (info != 0) throw NumericalError("zgeev failed, info=" + std::to_string(info));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index i, Index j) {
    if (w(i).real() != w(j).real()) return w(i).real() > w(j).real();
    return w(i).imag() > w(j).imag();
  });
  CVector sorted(n);
  for (Index i = 0; i < n; ++i) sorted(i) = w(order[static_cast<std::size_t>(i)]);
  return sorted;
}

std::vector<std::vector<Index>> eigenvalue_clusters(const CVector& values, double tol) {
  const Index n = values.size();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<Index(Index)> find = [&](Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(values(i) - values(j)) <= tol) {
        parent[static_cast<std::size_t>(find(i))] = find(j);
      }
  std::vector<std::vector<Index>> groups;
  std::vector<Index> root_to_group(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    if (root_to_group[static_cast<std::size_t>(r)] < 0) {
      root_to_group[static_cast<std::size_t>(r)] = static_cast<Index>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(root_to_group[static_cast<std::size_t>(r)])].push_back(i);
  }
  return groups;
}

Spectrum eig_biorthonormal(const CMatrix& a, double tol, const NumericPolicy& policy) {
  require_square(a, "eig_biorthonormal");
  require_finite(a, "eig_biorthonormal");
  const Index n = a.rows();
  CMatrix work = a;
  CVector w(n);
  CMatrix vl(n, n), vr(n, n);
  const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'V', 'V', static_cast<lapack_int>(n),
                                 work.data(), static_cast<lapack_int>(n), w.data(), vl.data(),
                                 static_cast<lapack_int>(n), vr.data(), static_cast<lapack_int>(n));
  if (info != 0) throw NumericalError("zgeev failed, info=" + std::to_string(info));

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index i, Index j) {
    if (w(i).real() != w(j).real()) return w(i).real() > w(j).real();
    return w(i).imag() > w(j).imag();
  });
  Spectrum s;
  s.eigenvalues.resize(n);
  s.right.resize(n, n);
  s.left.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    s.eigenvalues(i) = w(src);
    s.right.col(i) = vr.col(src);
    s.left.col(i) = vl.col(src);
  }

  const double scale = std::max(1e-300, s.eigenvalues.cwiseAbs().maxCoeff());
  const auto clusters = eigenvalue_clusters(s.eigenvalues, policy.cluster_tol_factor * scale);
  for (const auto& cluster : clusters) {
    const Index k = static_cast<Index>(cluster.size());
    CMatrix lc(n, k), rc(n, k);
    for (Index c = 0; c < k; ++c) {
      lc.col(c) = s.left.col(cluster[static_cast<std::size_t>(c)]);
      rc.col(c) = s.right.col(cluster[static_cast<std::size_t>(c)]);
    }
    const CMatrix gram = lc.adjoint() * rc;
    Eigen::JacobiSVD<CMatrix> svd(gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 1e-12 * std::max(1.0, smax)) {
      throw DefectiveSpectrumError("eig_biorthonormal: defective eigenvalue cluster (size " +
                                       std::to_string(k) + ")",
                                   cluster);
    }
    // L <- L G^{-dag} enforces L^dag R = I within the cluster.
    const CMatrix gram_inv_adj = gram.inverse().adjoint();
    lc = lc * gram_inv_adj;
    for (Index c = 0; c < k; ++c) {
      s.left.col(cluster[static_cast<std::size_t>(c)]) = lc.col(c);
    }
  }

  if (n <= 2048) {
    const CMatrix overlap = s.left.adjoint() * s.right;
    s.biorth_residual = (overlap - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (s.biorth_residual > std::max(tol, policy.biorth_tol)) {
      throw DefectiveSpectrumError(
          "eig_biorthonormal: biorthonormality residual " + std::to_string(s.biorth_residual) +
              " exceeds tolerance; spectrum treated as defective",
          {});
    }
  }
  return s;
}

std::vector<double> singular_values(const CMatrix& a) {
  Eigen::BDCSVD<CMatrix> svd(a);
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

CMatrix null_space(const CMatrix& a, double tol) {
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Index cols = a.cols();
  const Index rank_count = sv.size();
  std::vector<Index> keep;
  for (Index i = 0; i < cols; ++i) {
    const double s = i < rank_count ? sv(i) : 0.0;
    if (s <= tol) keep.push_back(i);
  }
  CMatrix basis(cols, static_cast<Index>(keep.size()));
  for (Index i = 0; i < static_cast<Index>(keep.size()); ++i) {
    basis.col(i) = svd.matrixV().col(keep[static_cast<std::size_t>(i)]);
  }
  return basis;
}

double operator_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() < rel_tol * scale;
}

}  // namespace haarmix
