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

#include "haarmix/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace haarmix {

EffectiveLiouvillean strong_effective(const SystemSpec& sys, int q, const NumericPolicy& policy) {
  const CMatrix hq = kron_sum_power(sys.H, q, policy.dense_cap);
  const CMatrix vq = kron_sum_power(sys.V, q, policy.dense_cap);
  const Index dq = hq.rows();

  Eigen::SelfAdjointEigenSolver<CMatrix> es(vq);
  const RVector v = es.eigenvalues();
  const CMatrix w = es.eigenvectors();
  const CMatrix ht = w.adjoint() * hq * w;

  const double vscale = std::max(1.0, v.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * vscale;

  // pair (i, j) spans the vectorized space; dissipator eigenvalue (v_i - v_j)^2 / 2
  std::vector<std::pair<Index, Index>> p_pairs, q_pairs;
  std::vector<double> d_qq;
  for (Index i = 0; i < dq; ++i) {
    for (Index j = 0; j < dq; ++j) {
      const double diff = v(i) - v(j);
      if (std::abs(diff) <= tol) {
        p_pairs.emplace_back(i, j);
      } else {
        q_pairs.emplace_back(i, j);
        d_qq.push_back(0.5 * diff * diff);
      }
    }
  }

  auto h_element = [&](const std::pair<Index, Index>& row, const std::pair<Index, Index>& col) {
    Complex e = 0.0;
    if (row.second == col.second) e += ht(row.first, col.first);
    if (row.first == col.first) e -= ht(col.second, row.second);
    return e;
  };

  const Index np = static_cast<Index>(p_pairs.size());
  const Index nq = static_cast<Index>(q_pairs.size());
  CMatrix h_pp(np, np), h_pq(np, nq);
  for (Index a = 0; a < np; ++a) {
    for (Index b = 0; b < np; ++b) h_pp(a, b) = h_element(p_pairs[a], p_pairs[b]);
    for (Index b = 0; b < nq; ++b) h_pq(a, b) = h_element(p_pairs[a], q_pairs[b]);
  }

  EffectiveLiouvillean eff;
  eff.sigma = sys.sigma;
  eff.projector_dim = np;
  eff.sigma_warning = sys.sigma < 10.0 * operator_norm(sys.H);
  if (nq == 0) {
    eff.matrix = -kI * h_pp;
    return eff;
  }
  RVector d_inv(nq);
  const double d_cut = policy.pinv_threshold * (*std::max_element(d_qq.begin(), d_qq.end()));
  for (Index b = 0; b < nq; ++b) {
    if (d_qq[static_cast<std::size_t>(b)] <= d_cut) {
      throw NumericalError("strong_effective: dissipator block is singular on Q");
    }
    d_inv(b) = 1.0 / d_qq[static_cast<std::size_t>(b)];
  }
  const CMatrix coupling = d_inv.asDiagonal() * h_pq.adjoint();
  eff.matrix = -kI * h_pp - (1.0 / sys.sigma) * (h_pq * coupling);
  eff.coupling_norm = operator_norm(coupling) / sys.sigma;
  return eff;
}

std::vector<double> gaudin_couplings(int length) {
  if (length < 2) throw DimensionError("gaudin_couplings: length >= 2 required");
  std::vector<double> g(static_cast<std::size_t>(length - 1));
  for (int k = 1; k < length; ++k) {
    const double s = std::sin(M_PI * k / length);
    g[static_cast<std::size_t>(k - 1)] = 2.0 / length * s * s;
  }
  return g;
}

namespace {

// Occupation state of both species over M flattened modes.
struct FockState {
  std::vector<std::int8_t> up;
  std::vector<std::int8_t> dn;

  bool operator<(const FockState& o) const {
    if (up != o.up) return up < o.up;
    return dn < o.dn;
  }
};

using StateAmplitudes = std::map<FockState, double>;

struct SectorSpace {
  int length = 0;
  int q = 1;
  int flavours = 1;
  bool fermionic = false;
  std::vector<FockState> basis;
  std::map<FockState, Index> index;

  int modes() const { return length * flavours; }
  int mode_id(int site_mode, int flavour) const { return site_mode * flavours + flavour; }
};

void enumerate_occupations(int modes, int total, int per_mode_cap, std::vector<std::int8_t>& acc,
                           std::vector<std::vector<std::int8_t>>& out) {
  const int filled = static_cast<int>(acc.size());
  if (filled == modes) {
    if (total == 0) out.push_back(acc);
    return;
  }
  const int cap = std::min(per_mode_cap, total);
  for (int n = 0; n <= cap; ++n) {
    acc.push_back(static_cast<std::int8_t>(n));
    enumerate_occupations(modes, total - n, per_mode_cap, acc, out);
    acc.pop_back();
  }
}

int site_zero_total(const SectorSpace& space, const std::vector<std::int8_t>& occ) {
  int total = 0;
  for (int u = 0; u < space.flavours; ++u) total += occ[static_cast<std::size_t>(space.mode_id(0, u))];
  return total;
}

SectorSpace build_sector_space(int length, int q, SectorRep rep) {
  SectorSpace space;
  space.length = length;
  space.q = q;
  space.flavours = rep == SectorRep::kGeneralFermion ? q : 1;
  space.fermionic = rep != SectorRep::kSymmetricBoson;
  const int cap = space.fermionic ? 1 : q;
  std::vector<std::vector<std::int8_t>> occs;
  std::vector<std::int8_t> acc;
  enumerate_occupations(space.modes(), q, cap, acc, occs);
  for (const auto& up : occs) {
    for (const auto& dn : occs) {
      if (site_zero_total(space, up) != site_zero_total(space, dn)) continue;
      FockState s{up, dn};
      space.index.emplace(s, static_cast<Index>(space.basis.size()));
      space.basis.push_back(std::move(s));
    }
  }
  if (space.basis.size() > 20000) {
    throw DimensionError("strong_chain_rwa_sector: sector dimension too large");
  }
  return space;
}

// Applies a single creation (dagger = true) or annihilation operator of the
// given species at flattened mode m; fermionic sign counts occupied modes
// below m within the species.
void apply_ladder(const SectorSpace& space, bool up_species, int m, bool dagger,
                  const StateAmplitudes& in, StateAmplitudes& out) {
  for (const auto& [state, amp] : in) {
    const auto& occ = up_species ? state.up : state.dn;
    const int n = occ[static_cast<std::size_t>(m)];
    double factor;
    if (dagger) {
      if (space.fermionic && n >= 1) continue;
      factor = space.fermionic ? 1.0 : std::sqrt(static_cast<double>(n + 1));
    } else {
      if (n == 0) continue;
      factor = space.fermionic ? 1.0 : std::sqrt(static_cast<double>(n));
    }
    if (space.fermionic) {
      int parity = 0;
      for (int b = 0; b < m; ++b) parity += occ[static_cast<std::size_t>(b)];
      if (parity % 2 == 1) factor = -factor;
    }
    FockState next = state;
    auto& next_occ = up_species ? next.up : next.dn;
    next_occ[static_cast<std::size_t>(m)] = static_cast<std::int8_t>(n + (dagger ? 1 : -1));
    out[next] += amp * factor;
  }
}

// B^{species}_{ab} = sum_u adag_{(a,u)} a_{(b,u)}
StateAmplitudes apply_bilinear(const SectorSpace& space, bool up_species, int a, int b,
                               const StateAmplitudes& in) {
  StateAmplitudes result;
  for (int u = 0; u < space.flavours; ++u) {
    StateAmplitudes tmp;
    apply_ladder(space, up_species, space.mode_id(b, u), false, in, tmp);
    apply_ladder(space, up_species, space.mode_id(a, u), true, tmp, result);
  }
  return result;
}

}  // namespace

SectorOperator strong_chain_rwa_sector(int length, int q, double sigma, SectorRep rep) {
  if (sigma <= 0.0) throw NumericalError("strong_chain_rwa_sector: sigma > 0 required");
  const SectorSpace space = build_sector_space(length, q, rep);
  const auto g = gaudin_couplings(length);
  const Index dim = static_cast<Index>(space.basis.size());
  RMatrix h = RMatrix::Zero(dim, dim);

  for (Index col = 0; col < dim; ++col) {
    StateAmplitudes seed{{space.basis[static_cast<std::size_t>(col)], 1.0}};
    for (int k = 1; k < length; ++k) {
      const double weight = -2.0 / sigma * g[static_cast<std::size_t>(k - 1)];
      StateAmplitudes total;
      auto accumulate = [&](const StateAmplitudes& contrib, double scale) {
        for (const auto& [state, amp] : contrib) total[state] += scale * amp;
      };
      for (const bool species : {true, false}) {
        accumulate(apply_bilinear(space, species, 0, k, apply_bilinear(space, species, k, 0, seed)),
                   1.0);
        accumulate(apply_bilinear(space, species, k, 0, apply_bilinear(space, species, 0, k, seed)),
                   1.0);
      }
      accumulate(apply_bilinear(space, true, 0, k, apply_bilinear(space, false, 0, k, seed)), -2.0);
      accumulate(apply_bilinear(space, true, k, 0, apply_bilinear(space, false, k, 0, seed)), -2.0);
      for (const auto& [state, amp] : total) {
        const auto it = space.index.find(state);
        if (it == space.index.end()) {
          throw NumericalError("strong_chain_rwa_sector: secular term left the sector");
        }
        h(it->second, col) += weight * amp;
      }
    }
  }
  SectorOperator op;
  op.matrix = std::move(h);
  op.dim = dim;
  op.length = length;
  op.q = q;
  op.rep = rep;
  return op;
}

EffectiveLiouvillean strong_chain_rwa(int length, int q, double sigma) {
  const SectorOperator op = strong_chain_rwa_sector(length, q, sigma, SectorRep::kSymmetricBoson);
  EffectiveLiouvillean eff;
  eff.matrix = op.matrix.cast<Complex>();
  eff.projector_dim = op.dim;
  eff.sigma = sigma;
  return eff;
}

RWABlocks weak_rwa(const SystemSpec& sys) {
  if (sys.H.imag().cwiseAbs().maxCoeff() > 1e-12 || sys.V.imag().cwiseAbs().maxCoeff() > 1e-12) {
    throw NumericalError("weak_rwa: real symmetric H and V required");
  }
  const Index d = sys.dim;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sys.H.real());
  const RVector omega = es.eigenvalues();
  const RMatrix w = es.eigenvectors().transpose() * sys.V.real() * es.eigenvectors();
  const RMatrix w2 = w * w;

  RWABlocks blocks;
  blocks.sigma = sys.sigma;
  const double hscale = std::max(1.0, omega.cwiseAbs().maxCoeff());
  blocks.res_tol = 1e-8 * hscale;

  for (Index i = 0; i + 1 < d; ++i) {
    if (std::abs(omega(i + 1) - omega(i)) <= blocks.res_tol) blocks.degenerate_flagged = true;
  }

  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) pairs.emplace_back(i, j);
  blocks.frequencies.reserve(pairs.size());
  for (const auto& [i, j] : pairs) blocks.frequencies.push_back(omega(i) - omega(j));

  std::vector<bool> claimed(pairs.size(), false);
  double min_offres_split = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    if (claimed[a]) continue;
    std::vector<std::size_t> members{a};
    claimed[a] = true;
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      if (claimed[b]) continue;
      const double split = std::abs(blocks.frequencies[a] - blocks.frequencies[b]);
      if (split <= blocks.res_tol) {
        members.push_back(b);
        claimed[b] = true;
      } else {
        min_offres_split = std::min(min_offres_split, split);
      }
    }
    RWABlock block;
    block.omega = blocks.frequencies[a];
    const Index m = static_cast<Index>(members.size());
    block.matrix.resize(m, m);
    for (Index r = 0; r < m; ++r) {
      block.pairs.push_back(pairs[members[static_cast<std::size_t>(r)]]);
      for (Index c = 0; c < m; ++c) {
        const auto [i, j] = pairs[members[static_cast<std::size_t>(r)]];
        const auto [k, l] = pairs[members[static_cast<std::size_t>(c)]];
        double e = 0.0;
        if (j == l) e += w2(i, k);
        if (i == k) e += w2(j, l);
        e -= 2.0 * w(i, k) * w(j, l);
        block.matrix(r, c) = sys.sigma / 2.0 * e;
      }
    }
    blocks.blocks.push_back(std::move(block));
  }
  blocks.validity_time =
      std::isfinite(min_offres_split) ? 1.0 / min_offres_split : 0.0;
  return blocks;
}

double weak_gap(const SystemSpec& sys) {
  const RWABlocks blocks = weak_rwa(sys);
  double scale = 0.0;
  std::vector<double> rates;
  for (const auto& block : blocks.blocks) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(block.matrix);
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
      rates.push_back(es.eigenvalues()(i));
      scale = std::max(scale, std::abs(es.eigenvalues()(i)));
    }
  }
  double gap = std::numeric_limits<double>::infinity();
  for (const double r : rates) {
    if (r > 1e-9 * scale) gap = std::min(gap, r);
  }
  if (!std::isfinite(gap)) throw NumericalError("weak_gap: no non-zero secular rate found");
  return gap;
}

double chain_weak_gap(int length, double sigma) {
  const double v11 = 2.0 / (length + 1) * std::pow(std::sin(M_PI / (length + 1)), 2);
  return sigma * (v11 - v11 * v11);
}

std::vector<double> weak_diagonal_solutions(int length, double sigma) {
  const Index L = length;
  std::vector<double> pole(static_cast<std::size_t>(L));
  std::vector<double> weight(static_cast<std::size_t>(L));
  for (Index l = 1; l <= L; ++l) {
    const double s2 = std::pow(std::sin(M_PI * l / (L + 1)), 2);
    const double vll = 2.0 / (L + 1) * s2;
    pole[static_cast<std::size_t>(l - 1)] = -sigma * vll;
    weight[static_cast<std::size_t>(l - 1)] = sigma * vll * vll;  // a_l^2
  }
  // merge coincident poles (l and L+1-l give equal V_ll)
  std::map<double, double> merged;
  for (std::size_t i = 0; i < pole.size(); ++i) {
    bool found = false;
    for (auto& [p, wsum] : merged) {
      if (std::abs(p - pole[i]) < 1e-12 * sigma) {
        wsum += weight[i];
        found = true;
        break;
      }
    }
    if (!found) merged[pole[i]] = weight[i];
  }
  std::vector<std::pair<double, double>> poles(merged.begin(), merged.end());  // ascending

  auto f = [&](double lambda) {
    double acc = 1.0;
    for (const auto& [p, wsum] : poles) acc -= wsum / (lambda - p);
    return acc;
  };
  std::vector<double> roots;
  for (std::size_t m = 0; m + 1 < poles.size(); ++m) {
    double lo = poles[m].first, hi = poles[m + 1].first;
    const double pad = 1e-12 * (hi - lo);
    lo += pad;
    hi -= pad;
    if (f(lo) > 0.0 || f(hi) < 0.0) continue;  // no sign change (degenerate weight)
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < 0.0 ? lo : hi) = mid;
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

}  // namespace haarmix
