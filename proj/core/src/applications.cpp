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

#include "haarmix/applications.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "haarmix/liouville.hpp"
#include "haarmix/spectral.hpp"

namespace haarmix {

Complex permanent(const CMatrix& m) {
  const Index n = m.rows();
  if (n != m.cols()) throw DimensionError("permanent: square matrix required");
  if (n > 20) throw DimensionError("permanent: dimension capped at 20");
  if (n == 0) return 1.0;
  // Ryser with Gray-code column sums
  CVector sums = CVector::Zero(n);
  Complex total = 0.0;
  std::uint32_t previous = 0;
  const std::uint32_t limit = 1u << n;
  for (std::uint32_t g = 1; g < limit; ++g) {
    const std::uint32_t gray = g ^ (g >> 1);
    const std::uint32_t changed = gray ^ previous;
    const int col = std::countr_zero(changed);
    const double sign_flip = (gray & changed) ? 1.0 : -1.0;
    sums += sign_flip * m.col(col);
    previous = gray;
    Complex prod = 1.0;
    for (Index i = 0; i < n; ++i) prod *= sums(i);
    const int bits = std::popcount(gray);
    total += ((n - bits) % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  return total;
}

double moment_error_bound(double expander_distance, double k_trace_norm) {
  if (expander_distance < 0.0) throw NumericalError("moment_error_bound: distance must be >= 0");
  return expander_distance * k_trace_norm;
}

namespace {

struct WickOperator {
  bool dagger = false;
  Index site = 0;
};

// <O_a O_b> in the evolved particle-conserving Gaussian state.
Complex pair_contraction(const WickOperator& a, const WickOperator& b, const CMatrix& g,
                         bool fermionic) {
  if (a.dagger && !b.dagger) return g(a.site, b.site);  // <adag a>
  if (!a.dagger && b.dagger) {
    const Complex stat = fermionic ? -g(b.site, a.site) : g(b.site, a.site);
    return (a.site == b.site ? 1.0 : 0.0) + stat;  // <a adag>
  }
  return 0.0;
}

Complex wick_sum(std::vector<WickOperator> ops, const CMatrix& g, bool fermionic) {
  if (ops.empty()) return 1.0;
  if (ops.size() % 2 == 1) return 0.0;
  const WickOperator first = ops.front();
  Complex total = 0.0;
  for (std::size_t m = 1; m < ops.size(); ++m) {
    const Complex c = pair_contraction(first, ops[m], g, fermionic);
    if (c == Complex(0.0)) continue;
    std::vector<WickOperator> rest;
    rest.reserve(ops.size() - 2);
    for (std::size_t r = 1; r < ops.size(); ++r) {
      if (r != m) rest.push_back(ops[r]);
    }
    const double sign = fermionic && (m % 2 == 0) ? -1.0 : 1.0;
    total += sign * c * wick_sum(std::move(rest), g, fermionic);
  }
  return total;
}

Complex multipoint_value(const CMatrix& g, const ContractionSpec& spec) {
  std::vector<WickOperator> ops;
  for (std::size_t m = 0; m < spec.dagger_sites.size(); ++m) {
    ops.push_back({true, spec.dagger_sites[m]});
    ops.push_back({false, spec.plain_sites[m]});
  }
  return wick_sum(std::move(ops), g, spec.fermionic);
}

// Ordered Majorana string for sigma^a_i sigma^b_j, i < j, in the A/B
// operators A_m = cdag_m + c_m, B_m = cdag_m - c_m:
//   sigma^x_i sigma^x_j = B_i (prod A_l B_l) A_j
//   sigma^y_i sigma^y_j = -A_i (prod A_l B_l) B_j
//   sigma^x_i sigma^y_j = -i B_i (prod A_l B_l) B_j
//   sigma^y_i sigma^x_j =  i A_i (prod A_l B_l) A_j
struct MajoranaOp {
  bool b_type = false;
  Index site = 0;
};

Complex majorana_pair(const MajoranaOp& x, const MajoranaOp& y, const CMatrix& g) {
  const Complex c_xy = g(x.site, y.site);
  const Complex c_yx = g(y.site, x.site);
  const double delta = x.site == y.site ? 1.0 : 0.0;
  if (!x.b_type && !y.b_type) return c_xy + delta - c_yx;   // <A A>
  if (!x.b_type && y.b_type) return -c_xy + delta - c_yx;   // <A B>
  if (x.b_type && !y.b_type) return c_xy - delta + c_yx;    // <B A>
  return -c_xy - delta + c_yx;                              // <B B>
}

Complex xy_value(const CMatrix& g, const ContractionSpec& spec) {
  Index i = spec.site_i, j = spec.site_j;
  char op_i = spec.op_i, op_j = spec.op_j;
  if (i == j) throw DimensionError("xy correlator: distinct sites required");
  if (i > j) {  // spin operators at different sites commute
    std::swap(i, j);
    std::swap(op_i, op_j);
  }
  std::vector<MajoranaOp> ops;
  Complex prefactor;
  if (op_i == 'x' && op_j == 'x') {
    prefactor = 1.0;
    ops.push_back({true, i});
  } else if (op_i == 'y' && op_j == 'y') {
    prefactor = -1.0;
    ops.push_back({false, i});
  } else if (op_i == 'x' && op_j == 'y') {
    prefactor = -kI;
    ops.push_back({true, i});
  } else {
    prefactor = kI;
    ops.push_back({false, i});
  }
  for (Index l = i + 1; l < j; ++l) {
    ops.push_back({false, l});
    ops.push_back({true, l});
  }
  const bool right_b = (op_j == 'y');
  ops.push_back({right_b, j});

  // Pfaffian over the ordered pair matrix
  const auto n = static_cast<Index>(ops.size());
  CMatrix pf = CMatrix::Zero(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index s = r + 1; s < n; ++s) {
      pf(r, s) = majorana_pair(ops[static_cast<std::size_t>(r)], ops[static_cast<std::size_t>(s)], g);
      pf(s, r) = -pf(r, s);
    }
  }
  // spin operators S = sigma/2
  return prefactor * pfaffian(pf) / 4.0;
}

}  // namespace

Complex pfaffian(const CMatrix& a) {
  const Index n = a.rows();
  if (n != a.cols() || n % 2 == 1) throw DimensionError("pfaffian: even square matrix required");
  if (n == 0) return 1.0;
  CMatrix m = a;
  Complex pf = 1.0;
  // Parlett-Reid style elimination with partial pivoting
  for (Index k = 0; k + 1 < n; k += 2) {
    Index pivot = k + 1;
    double best = std::abs(m(k, k + 1));
    for (Index r = k + 2; r < n; ++r) {
      if (std::abs(m(k, r)) > best) {
        best = std::abs(m(k, r));
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != k + 1) {
      m.row(pivot).swap(m.row(k + 1));
      m.col(pivot).swap(m.col(k + 1));
      pf = -pf;
    }
    pf *= m(k, k + 1);
    if (k + 2 < n) {
      const Complex inv = 1.0 / m(k, k + 1);
      for (Index r = k + 2; r < n; ++r) {
        const Complex fk = m(k, r) * inv;
        const Complex fk1 = m(k + 1, r) * inv;
        for (Index s = k + 2; s < n; ++s) {
          m(r, s) += fk * m(k + 1, s) - fk1 * m(k, s);
        }
      }
      // re-antisymmetrize the trailing block to suppress drift
      for (Index r = k + 2; r < n; ++r) {
        for (Index s = r + 1; s < n; ++s) {
          const Complex v = 0.5 * (m(r, s) - m(s, r));
          m(r, s) = v;
          m(s, r) = -v;
        }
      }
    }
  }
  return pf;
}

Complex multipoint_correlator(const CMatrix& u, const ContractionSpec& spec) {
  switch (spec.kind) {
    case ContractionSpec::Kind::kBosonSampling: {
      CMatrix sub(static_cast<Index>(spec.rows.size()), static_cast<Index>(spec.cols.size()));
      for (Index r = 0; r < sub.rows(); ++r) {
        for (Index c = 0; c < sub.cols(); ++c) {
          sub(r, c) = u(spec.rows[static_cast<std::size_t>(r)], spec.cols[static_cast<std::size_t>(c)]);
        }
      }
      const Complex per = permanent(sub);
      return per * std::conj(per);
    }
    case ContractionSpec::Kind::kMultipoint: {
      const CMatrix g = u * spec.initial_correlations * u.adjoint();
      return multipoint_value(g, spec);
    }
    case ContractionSpec::Kind::kXy: {
      const CMatrix g = u * spec.initial_correlations * u.adjoint();
      return xy_value(g, spec);
    }
  }
  throw ConfigError("contraction", "unknown kind");
}

namespace {

void decode_multi(Index idx, Index d, int q, std::vector<Index>& digits) {
  for (int k = q - 1; k >= 0; --k) {
    digits[static_cast<std::size_t>(k)] = idx % d;
    idx /= d;
  }
}

}  // namespace

CMatrix contraction_operator_dense(const ContractionSpec& spec, Index d) {
  const int q = spec.q;
  Index dq = 1;
  for (int k = 0; k < q; ++k) dq *= d;
  const Index n = dq * dq;
  CMatrix k_op = CMatrix::Zero(n, n);
  if (spec.kind == ContractionSpec::Kind::kMultipoint) {
    if (static_cast<int>(spec.dagger_sites.size()) != q ||
        static_cast<int>(spec.plain_sites.size()) != q) {
      throw DimensionError("contraction_operator_dense: q index pairs required");
    }
    Index row_j = 0, row_i = 0;
    {
      Index acc_j = 0, acc_i = 0;
      for (int m = 0; m < q; ++m) {
        acc_j = acc_j * d + spec.plain_sites[static_cast<std::size_t>(m)];
        acc_i = acc_i * d + spec.dagger_sites[static_cast<std::size_t>(m)];
      }
      row_j = acc_j;
      row_i = acc_i;
    }
    const Index row = row_j * dq + row_i;
    std::vector<Index> kv(static_cast<std::size_t>(q)), lv(static_cast<std::size_t>(q));
    for (Index l = 0; l < dq; ++l) {
      decode_multi(l, d, q, lv);
      for (Index k = 0; k < dq; ++k) {
        decode_multi(k, d, q, kv);
        std::vector<WickOperator> ops;
        for (int m = 0; m < q; ++m) {
          ops.push_back({true, kv[static_cast<std::size_t>(m)]});
          ops.push_back({false, lv[static_cast<std::size_t>(m)]});
        }
        const Complex t0 = wick_sum(std::move(ops), spec.initial_correlations, spec.fermionic);
        k_op(l * dq + k, row) = t0;
      }
    }
    return k_op;
  }
  if (spec.kind == ContractionSpec::Kind::kBosonSampling) {
    if (static_cast<int>(spec.rows.size()) != q || static_cast<int>(spec.cols.size()) != q) {
      throw DimensionError("contraction_operator_dense: q rows and cols required");
    }
    Index row_enc = 0;
    for (int m = 0; m < q; ++m) row_enc = row_enc * d + spec.rows[static_cast<std::size_t>(m)];
    const Index row = row_enc * dq + row_enc;
    // u vector: counts of permutations sending the column list onto each multi-index
    std::map<Index, double> u_entries;
    std::vector<Index> cols = spec.cols;
    std::sort(cols.begin(), cols.end());
    do {
      Index enc = 0;
      for (const Index c : cols) enc = enc * d + c;
      u_entries[enc] += 1.0;
    } while (std::next_permutation(cols.begin(), cols.end()));
    // each distinct arrangement appears once above; multiplicity is the
    // number of permutations realizing it
    double repeats = 1.0;
    {
      std::map<Index, int> mult;
      for (const Index c : spec.cols) ++mult[c];
      for (const auto& [site, m] : mult) {
        (void)site;
        for (int f = 2; f <= m; ++f) repeats *= f;
      }
    }
    for (const auto& [le, lw] : u_entries) {
      for (const auto& [ke, kw] : u_entries) {
        k_op(le * dq + ke, row) = lw * kw * repeats * repeats;
      }
    }
    return k_op;
  }
  throw ConfigError("contraction", "dense form available for multipoint and boson sampling only");
}

double ContractionSpec::trace_norm() const {
  if (k_norm_override > 0.0) return k_norm_override;
  switch (kind) {
    case Kind::kBosonSampling: {
      // ||K||_1 = q! * prod(column multiplicities!)
      std::map<Index, int> mult;
      for (const Index c : cols) ++mult[c];
      double norm = 1.0;
      for (int f = 2; f <= q; ++f) norm *= f;
      for (const auto& [site, m] : mult) {
        (void)site;
        for (int f = 2; f <= m; ++f) norm *= f;
      }
      return norm;
    }
    case Kind::kMultipoint: {
      // rank-one K: ||K||_1 = Frobenius norm of the initial 2q-point tensor
      const Index d = initial_correlations.rows();
      Index dq = 1;
      for (int k = 0; k < q; ++k) dq *= d;
      double acc = 0.0;
      std::vector<Index> kv(static_cast<std::size_t>(q)), lv(static_cast<std::size_t>(q));
      for (Index l = 0; l < dq; ++l) {
        decode_multi(l, d, q, lv);
        for (Index k = 0; k < dq; ++k) {
          decode_multi(k, d, q, kv);
          std::vector<WickOperator> ops;
          for (int m = 0; m < q; ++m) {
            ops.push_back({true, kv[static_cast<std::size_t>(m)]});
            ops.push_back({false, lv[static_cast<std::size_t>(m)]});
          }
          acc += std::norm(wick_sum(std::move(ops), initial_correlations, fermionic));
        }
      }
      return std::sqrt(acc);
    }
    case Kind::kXy:
      throw ConfigError("contraction.k_norm", "xy contractions need an explicit trace norm");
  }
  throw ConfigError("contraction", "unknown kind");
}

ControlTimeEstimate control_time_estimate(int length, const std::vector<double>& sigma_grid,
                                          const NumericPolicy& policy) {
  if (sigma_grid.size() < 2) {
    throw DimensionError("control_time_estimate: grid with at least two points required");
  }
  ControlTimeEstimate est;
  est.sigmas = sigma_grid;
  est.t_star_min = std::numeric_limits<double>::infinity();
  for (const double sigma : sigma_grid) {
    const LiouvilleanQ lq = build_liouvillean(chain_system({length, 1}, sigma), 1, policy);
    const double gap = spectral_gap(lq, 0.0, policy).lambda_star;
    const double t_star = 1.0 / gap;
    est.t_star.push_back(t_star);
    if (t_star < est.t_star_min) {
      est.t_star_min = t_star;
      est.sigma_argmin = sigma;
    }
  }
  return est;
}

}  // namespace haarmix
