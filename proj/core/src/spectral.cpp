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

#include "haarmix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "haarmix/bethe.hpp"
#include "haarmix/rng.hpp"

namespace haarmix {

GapReport spectral_gap(const CMatrix& generator, double zero_tol, const NumericPolicy& policy) {
  GapReport report;
  bool have_vectors = true;
  Spectrum spec;
  try {
    spec = eig_biorthonormal(generator, policy.biorth_tol, policy);
    report.eigenvalues = spec.eigenvalues;
  } catch (const DefectiveSpectrumError&) {
    // fall back to eigenvalues from the Schur form only
    have_vectors = false;
    report.defective = true;
    report.eigenvalues = eigenvalues_only(generator);
  }
  const double radius = report.eigenvalues.size() == 0
                            ? 0.0
                            : report.eigenvalues.cwiseAbs().maxCoeff();
  report.zero_tol = zero_tol > 0.0 ? zero_tol : policy.zero_tol_factor * std::max(radius, 1e-300);

  double gap = std::numeric_limits<double>::infinity();
  Index steady = 0;
  for (Index i = 0; i < report.eigenvalues.size(); ++i) {
    const Complex lambda = report.eigenvalues(i);
    if (std::abs(lambda) <= report.zero_tol) ++steady;
    const double re = std::abs(lambda.real());
    if (re > report.zero_tol) gap = std::min(gap, re);
  }
  report.steady_dim = steady;
  report.lambda_star = std::isfinite(gap) ? gap : 0.0;

  if (have_vectors) {
    CMatrix unit_right = spec.right;
    for (Index c = 0; c < unit_right.cols(); ++c) unit_right.col(c).normalize();
    const auto sv = singular_values(unit_right);
    const double smin = sv.empty() ? 0.0 : sv.back();
    report.kappa = smin > 0.0 ? sv.front() / smin : std::numeric_limits<double>::infinity();
  } else {
    report.kappa = std::numeric_limits<double>::infinity();
  }
  return report;
}

GapReport spectral_gap(const LiouvilleanQ& lq, double zero_tol, const NumericPolicy& policy) {
  if (!lq.dense) {
    throw DimensionError("spectral_gap: dense generator required (matrix-free handle given)");
  }
  return spectral_gap(lq.matrix, zero_tol, policy);
}

SingularGap singular_gap(const LiouvilleanQ& lq, double t, const NumericPolicy& policy) {
  if (t <= 0.0) throw NumericalError("singular_gap: t > 0 required");
  if (!lq.dense) throw DimensionError("singular_gap: dense generator required");
  const GapReport report = spectral_gap(lq, 0.0, policy);
  const CMatrix propagator = expm(t * lq.matrix);
  const auto sv = singular_values(propagator);
  const Index skip = std::min<Index>(report.steady_dim, static_cast<Index>(sv.size()) - 1);
  SingularGap out;
  out.s_star = sv[static_cast<std::size_t>(skip)];
  if (report.lambda_star > 0.0 && out.s_star > 0.0) {
    const double rate = -std::log(out.s_star) / t;
    out.delta = std::abs(report.lambda_star - rate) / report.lambda_star;
  } else {
    out.delta = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

MixingEstimate mixing_bounds(const GapReport& report, int q, Index d) {
  if (report.lambda_star <= 0.0) throw NumericalError("mixing_bounds: positive gap required");
  MixingEstimate est;
  est.q = q;
  est.d = d;
  const double log_kappa = std::isfinite(report.kappa) ? std::log(report.kappa) : 0.0;
  est.t_upper = (4.0 * q * std::log(static_cast<double>(d)) + 2.0 * log_kappa) / report.lambda_star;
  est.t_lower = static_cast<double>(q) / report.lambda_star;
  return est;
}

GapScan gap_vs_q_scan(const SystemSpec& sys, int q_max, const NumericPolicy& policy) {
  GapScan scan;
  for (int q = 1; q <= q_max; ++q) {
    Index dim = 1;
    bool fits = true;
    for (int k = 0; k < 2 * q; ++k) {
      if (dim > policy.dense_cap / sys.dim) {
        fits = false;
        break;
      }
      dim *= sys.dim;
    }
    if (!fits) {
      scan.truncated = true;
      break;
    }
    const LiouvilleanQ lq = build_liouvillean(sys, q, policy);
    scan.entries.push_back({q, spectral_gap(lq, 0.0, policy).lambda_star});
  }
  return scan;
}

ScalingFit gap_scaling_fit(const std::vector<ChainSpec>& family, double sigma,
                           const NumericPolicy& policy) {
  if (family.size() < 4) throw DimensionError("gap_scaling_fit: at least 4 lengths required");
  std::vector<double> xs, ys;
  for (const auto& spec : family) {
    const LiouvilleanQ lq = build_liouvillean(chain_system(spec, sigma), 1, policy);
    const double gap = spectral_gap(lq, 0.0, policy).lambda_star;
    xs.push_back(std::log(static_cast<double>(spec.length)));
    ys.push_back(std::log(gap));
  }
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  ScalingFit fit;
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.prefactor = std::exp((sy - fit.exponent * sx) / n);
  return fit;
}

double expander_distance_semigroup(const LiouvilleanQ& lq, double t, const NumericPolicy& policy) {
  if (!lq.dense) return expander_distance_power(lq, t, policy);
  const HaarProjector hp = haar_projector(lq.sys.dim, lq.q, policy);
  const CMatrix diff = expm(t * lq.matrix) - hp.projector;
  return operator_norm(diff);
}

CVector expm_multiply(const LiouvilleanQ& lq, double t, const CVector& v, int krylov_dim,
                      double step_tol) {
  // One-shot Arnoldi with adaptive sub-stepping on the time interval.
  const Index n = v.size();
  const double vnorm = v.norm();
  if (vnorm == 0.0) return v;
  CVector current = v;
  // crude scale estimate to choose sub-steps
  const double scale = (operator_norm(lq.sys.H) + lq.sys.sigma * operator_norm(lq.sys.V)) *
                           (2.0 * lq.q) +
                       1e-12;
  const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(t) * scale / 10.0)));
  const double dt = t / substeps;
  for (int s = 0; s < substeps; ++s) {
    const double beta = current.norm();
    if (beta == 0.0) return current;
    const int m = std::min<int>(krylov_dim, static_cast<int>(n));
    CMatrix basis(n, m + 1);
    CMatrix hess = CMatrix::Zero(m + 1, m);
    basis.col(0) = current / beta;
    int built = m;
    for (int j = 0; j < m; ++j) {
      CVector w = lq.apply(basis.col(j));
      for (int i = 0; i <= j; ++i) {
        hess(i, j) = basis.col(i).dot(w);
        w -= hess(i, j) * basis.col(i);
      }
      // re-orthogonalize once
      for (int i = 0; i <= j; ++i) {
        const Complex c = basis.col(i).dot(w);
        hess(i, j) += c;
        w -= c * basis.col(i);
      }
      hess(j + 1, j) = w.norm();
      if (std::abs(hess(j + 1, j)) < step_tol) {
        built = j + 1;
        break;
      }
      if (j + 1 <= m) basis.col(j + 1) = w / hess(j + 1, j);
    }
    const CMatrix hm = hess.topLeftCorner(built, built);
    const CMatrix eh = expm(dt * hm);
    current = beta * (basis.leftCols(built) * eh.col(0));
  }
  return current;
}

double expander_distance_power(const LiouvilleanQ& lq, double t, const NumericPolicy& policy) {
  const HaarProjector hp = haar_projector(lq.sys.dim, lq.q, policy);
  const Index n = lq.super_dim();

  // The adjoint semigroup is generated by the same Liouvillean with H -> -H.
  LiouvilleanQ adj = lq;
  adj.sys.H = -adj.sys.H;
  adj.Hq = -adj.Hq;
  if (adj.dense) adj.matrix = lq.matrix.adjoint();

  auto apply_diff = [&](const LiouvilleanQ& gen, const CVector& x) {
    const CVector propagated =
        gen.dense ? CVector(expm(t * gen.matrix) * x) : expm_multiply(gen, t, x);
    return CVector(propagated - hp.apply(x));
  };

  // power iteration on D^dag D with the steady block removed by the projector
  Rng rng(0x5eedULL + static_cast<std::uint64_t>(n));
  CVector x(n);
  for (Index i = 0; i < n; ++i) x(i) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < policy.max_power_iterations; ++it) {
    const CVector y = apply_diff(lq, x);
    const CVector z = apply_diff(adj, y);
    const double next = std::sqrt(z.norm());
    if (next == 0.0) return 0.0;
    const double delta = std::abs(next - estimate);
    estimate = next;
    x = z / z.norm();
    if (it > 3 && delta < policy.power_tol * std::max(1.0, estimate)) break;
  }
  return estimate;
}

double sigma_strong_threshold(int chain_length, const NumericPolicy& policy) {
  auto relative_error = [&](double sigma) {
    const LiouvilleanQ lq = build_liouvillean(chain_system({chain_length, 1}, sigma), 1, policy);
    const double dense = spectral_gap(lq, 0.0, policy).lambda_star;
    const double strong = gap_certificate(chain_length, sigma);
    return std::abs(dense - strong) / strong;
  };
  double lo = 1.0, hi = 1.0;
  // bracket: find hi with error < 1% and lo with error > 1%
  while (relative_error(hi) >= 0.01 && hi < 1e6) hi *= 2.0;
  while (relative_error(lo) < 0.01 && lo > 1e-6) lo /= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (relative_error(mid) < 0.01) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace haarmix
