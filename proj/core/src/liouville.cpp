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

#include "haarmix/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace haarmix {

std::vector<Permutation> all_permutations(int q) {
  Permutation p(static_cast<std::size_t>(q));
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    c[i] = a[static_cast<std::size_t>(b[i])];
  }
  return c;
}

Permutation inverse(const Permutation& a) {
  Permutation inv(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) inv[static_cast<std::size_t>(a[i])] = static_cast<int>(i);
  return inv;
}

int cycle_count(const Permutation& a) {
  std::vector<bool> seen(a.size(), false);
  int cycles = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    std::size_t j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = static_cast<std::size_t>(a[j]);
    }
  }
  return cycles;
}

namespace {

// Decodes a q-digit base-d index, most significant digit = copy 1.
void decode(Index idx, Index d, int q, std::vector<Index>& digits) {
  for (int k = q - 1; k >= 0; --k) {
    digits[static_cast<std::size_t>(k)] = idx % d;
    idx /= d;
  }
}

Index encode(const std::vector<Index>& digits, Index d) {
  Index idx = 0;
  for (const Index dig : digits) idx = idx * d + dig;
  return idx;
}

}  // namespace

PermutationOperator permutation_operator(const Permutation& sigma, Index d, int q) {
  if (static_cast<int>(sigma.size()) != q) {
    throw DimensionError("permutation_operator: permutation size != q");
  }
  const Index dim = tensor_power_dim(d, q, std::numeric_limits<Index>::max() / 4);
  const Permutation inv = inverse(sigma);
  PermutationOperator p;
  p.sigma = sigma;
  p.d = d;
  p.matrix = CMatrix::Zero(dim, dim);
  std::vector<Index> in(static_cast<std::size_t>(q)), out(static_cast<std::size_t>(q));
  for (Index col = 0; col < dim; ++col) {
    decode(col, d, q, in);
    for (int k = 0; k < q; ++k) {
      out[static_cast<std::size_t>(k)] = in[static_cast<std::size_t>(inv[static_cast<std::size_t>(k)])];
    }
    p.matrix(encode(out, d), col) = 1.0;
  }
  return p;
}

RMatrix gram_matrix(Index d, int q) {
  const auto perms = all_permutations(q);
  const Index m = static_cast<Index>(perms.size());
  RMatrix gram(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) {
      const auto rel = compose(inverse(perms[static_cast<std::size_t>(a)]),
                               perms[static_cast<std::size_t>(b)]);
      gram(a, b) = std::pow(static_cast<double>(d), cycle_count(rel));
    }
  }
  return gram;
}

RMatrix gram_pinv(const RMatrix& m, double threshold) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
  const RVector& ev = es.eigenvalues();
  const double cutoff = threshold * std::max(1.0, ev.cwiseAbs().maxCoeff());
  RVector inv = RVector::Zero(ev.size());
  for (Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) > cutoff) inv(i) = 1.0 / ev(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

CVector LiouvilleanQ::apply(const CVector& x) const {
  if (dense) return matrix * x;
  const CMatrix rho = unvec(x);
  const CMatrix comm_v = Vq * rho - rho * Vq;
  const CMatrix result = -kI * (Hq * rho - rho * Hq) -
                         (sys.sigma / 2.0) * (Vq * comm_v - comm_v * Vq);
  return vec(result);
}

LiouvilleanQ build_liouvillean(const SystemSpec& sys, int q, const NumericPolicy& policy) {
  LiouvilleanQ lq;
  lq.sys = sys;
  lq.q = q;
  // Hq itself must stay dense even in matrix-free mode.
  lq.Hq = kron_sum_power(sys.H, q, policy.dense_cap);
  lq.Vq = kron_sum_power(sys.V, q, policy.dense_cap);
  lq.copy_dim = lq.Hq.rows();
  if (lq.copy_dim > policy.dense_cap / lq.copy_dim) {
    lq.dense = false;  // d^{2q} above cap: expose the action only
    return lq;
  }
  const CMatrix h_comm = commutator_super(lq.Hq);
  const CMatrix v_comm = commutator_super(lq.Vq);
  lq.dense = true;
  lq.matrix = -kI * h_comm - (sys.sigma / 2.0) * (v_comm * v_comm);
  return lq;
}

std::pair<CMatrix, CMatrix> local_decomposition(const LiouvilleanQ& lq) {
  if (!lq.dense) throw DimensionError("local_decomposition: dense generator required");
  const Index d = lq.sys.dim;
  const int q = lq.q;
  const Index dq = lq.copy_dim;

  // Single-copy embeddings X_k = I^{k-1} x X x I^{q-k} on the copy space.
  auto embed = [&](const CMatrix& x, int k) {
    CMatrix m = CMatrix::Identity(1, 1);
    for (int c = 0; c < q; ++c) {
      m = kron(m, c == k ? x : CMatrix::Identity(d, d));
    }
    return m;
  };

  CMatrix local = CMatrix::Zero(dq * dq, dq * dq);
  std::vector<CMatrix> v_comms;
  v_comms.reserve(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) {
    const CMatrix hk = commutator_super(embed(lq.sys.H, k));
    const CMatrix vk = commutator_super(embed(lq.sys.V, k));
    v_comms.push_back(vk);
    local += -kI * hk - (lq.sys.sigma / 2.0) * (vk * vk);
  }
  CMatrix interaction = CMatrix::Zero(dq * dq, dq * dq);
  for (int k = 0; k < q; ++k) {
    for (int l = 0; l < q; ++l) {
      if (k == l) continue;
      interaction -= (lq.sys.sigma / 2.0) *
                     (v_comms[static_cast<std::size_t>(k)] * v_comms[static_cast<std::size_t>(l)]);
    }
  }
  return {local, interaction};
}

CMatrix haar_twirl(const CMatrix& rho0, Index d, int q) {
  if (rho0.rows() != rho0.cols()) throw DimensionError("haar_twirl: square input required");
  const Index dq = tensor_power_dim(d, q, std::numeric_limits<Index>::max() / 4);
  if (rho0.rows() != dq) throw DimensionError("haar_twirl: input must live on (C^d)^{x q}");
  const auto perms = all_permutations(q);
  const RMatrix gram = gram_matrix(d, q);
  const RMatrix ginv = gram_pinv(gram);
  std::vector<CMatrix> p_ops;
  p_ops.reserve(perms.size());
  for (const auto& s : perms) p_ops.push_back(permutation_operator(s, d, q).matrix);

  CMatrix out = CMatrix::Zero(dq, dq);
  for (std::size_t a = 0; a < perms.size(); ++a) {
    Complex weight = 0.0;
    for (std::size_t b = 0; b < perms.size(); ++b) {
      const Complex overlap = (p_ops[b].adjoint() * rho0).trace();
      weight += ginv(static_cast<Index>(a), static_cast<Index>(b)) * overlap;
    }
    out += weight * p_ops[a];
  }
  return out;
}

CVector HaarProjector::apply(const CVector& x) const {
  if (projector.size() > 0) return projector * x;
  const Index m = static_cast<Index>(perm_vecs_.size());
  CVector overlaps(m);
  for (Index b = 0; b < m; ++b) overlaps(b) = perm_vecs_[static_cast<std::size_t>(b)].dot(x);
  CVector out = CVector::Zero(x.size());
  for (Index a = 0; a < m; ++a) {
    Complex w = 0.0;
    for (Index b = 0; b < m; ++b) w += gram_pinverse(a, b) * overlaps(b);
    out += w * perm_vecs_[static_cast<std::size_t>(a)];
  }
  return out;
}

HaarProjector haar_projector(Index d, int q, const NumericPolicy& policy) {
  HaarProjector hp;
  hp.d = d;
  hp.q = q;
  hp.gram = gram_matrix(d, q);
  hp.gram_pinverse = gram_pinv(hp.gram, policy.pinv_threshold);
  const auto perms = all_permutations(q);
  const Index dq = tensor_power_dim(d, q, std::numeric_limits<Index>::max() / 4);
  hp.perm_vecs_.reserve(perms.size());
  for (const auto& s : perms) {
    hp.perm_vecs_.push_back(vec(permutation_operator(s, d, q).matrix));
  }
  if (dq <= policy.dense_cap / dq) {
    const Index n = dq * dq;
    hp.projector = CMatrix::Zero(n, n);
    for (std::size_t a = 0; a < perms.size(); ++a) {
      for (std::size_t b = 0; b < perms.size(); ++b) {
        hp.projector += hp.gram_pinverse(static_cast<Index>(a), static_cast<Index>(b)) *
                        hp.perm_vecs_[a] * hp.perm_vecs_[b].adjoint();
      }
    }
  }
  return hp;
}

CMatrix lifted_superop_product(const std::vector<CMatrix>& factors, Index d) {
  const int q = static_cast<int>(factors.size());
  if (q == 0) throw DimensionError("lifted_superop_product: at least one factor");
  for (const auto& f : factors) {
    if (f.rows() != d * d || f.cols() != d * d) {
      throw DimensionError("lifted_superop_product: factors must be d^2 x d^2");
    }
  }
  const Index dq = tensor_power_dim(d, q, std::numeric_limits<Index>::max() / 4);
  const Index n = dq * dq;
  CMatrix out(n, n);
  std::vector<Index> ik(static_cast<std::size_t>(q)), jk(static_cast<std::size_t>(q)),
      kk(static_cast<std::size_t>(q)), lk(static_cast<std::size_t>(q));
  for (Index row = 0; row < n; ++row) {
    decode(row / dq, d, q, ik);
    decode(row % dq, d, q, jk);
    for (Index col = 0; col < n; ++col) {
      decode(col / dq, d, q, kk);
      decode(col % dq, d, q, lk);
      Complex prod = 1.0;
      for (int c = 0; c < q && prod != Complex(0.0); ++c) {
        const auto cc = static_cast<std::size_t>(c);
        prod *= factors[cc](ik[cc] * d + jk[cc], kk[cc] * d + lk[cc]);
      }
      out(row, col) = prod;
    }
  }
  return out;
}

std::vector<std::pair<Complex, CMatrix>> eigenprojection_clusters(const Spectrum& s,
                                                                  const NumericPolicy& policy) {
  const double scale = std::max(1e-300, s.eigenvalues.cwiseAbs().maxCoeff());
  const auto clusters = eigenvalue_clusters(s.eigenvalues, policy.cluster_tol_factor * scale);
  std::vector<std::pair<Complex, CMatrix>> out;
  out.reserve(clusters.size());
  for (const auto& cluster : clusters) {
    Complex mean = 0.0;
    CMatrix proj = CMatrix::Zero(s.right.rows(), s.right.rows());
    for (const Index idx : cluster) {
      mean += s.eigenvalues(idx);
      proj += s.right.col(idx) * s.left.col(idx).adjoint();
    }
    mean /= static_cast<double>(cluster.size());
    out.emplace_back(mean, std::move(proj));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.real() != b.first.real()) return a.first.real() > b.first.real();
    return a.first.imag() > b.first.imag();
  });
  return out;
}

CMatrix lifted_eigenprojection(const Spectrum& single_copy, int i, int j, int q,
                               const NumericPolicy& policy) {
  const Index n1 = single_copy.right.rows();
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n1))));
  if (d * d != n1) {
    throw DimensionError("lifted_eigenprojection: spectrum is not a single-copy superoperator");
  }
  if (j < 1 || j > q) throw DimensionError("lifted_eigenprojection: copy index out of range");
  const auto clusters = eigenprojection_clusters(single_copy, policy);
  if (i < 0 || i >= static_cast<int>(clusters.size())) {
    throw DimensionError("lifted_eigenprojection: eigenvalue cluster index out of range");
  }
  const CMatrix& steady = clusters[0].second;
  const CMatrix& excited = clusters[static_cast<std::size_t>(i)].second;
  std::vector<CMatrix> factors;
  factors.reserve(static_cast<std::size_t>(q));
  for (int c = 1; c <= q; ++c) factors.push_back(c == j ? excited : steady);
  return lifted_superop_product(factors, d);
}

}  // namespace haarmix
