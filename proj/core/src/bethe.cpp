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

#include "haarmix/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "haarmix/effective.hpp"
#include "haarmix/rng.hpp"

namespace haarmix {

GaudinCouplings make_gaudin_couplings(int length, double sigma) {
  if (sigma <= 0.0) throw NumericalError("make_gaudin_couplings: sigma > 0 required");
  GaudinCouplings c;
  c.L = length;
  c.g = gaudin_couplings(length);
  c.sigma = sigma;
  return c;
}

int ExcitationPattern::total_unpaired() const {
  int sum = 0;
  for (std::size_t k = 0; k < n_up.size(); ++k) sum += total(k);
  return sum;
}

void ExcitationPattern::validate(BetheAlgebra algebra, int L, int q) const {
  if (static_cast<int>(n_up.size()) != L - 1 || static_cast<int>(n_down.size()) != L - 1) {
    throw DimensionError("ExcitationPattern: occupation arrays must have length L-1");
  }
  int up = 0, down = 0;
  for (std::size_t k = 0; k + 1 < static_cast<std::size_t>(L); ++k) {
    if (n_up[k] < 0 || n_down[k] < 0) {
      throw NumericalError("ExcitationPattern: negative occupation");
    }
    if (n_up[k] > 0 && n_down[k] > 0) {
      throw NumericalError("ExcitationPattern: mixed species in one mode");
    }
    if (algebra == BetheAlgebra::kSu2 && total(k) > 1) {
      throw NumericalError("ExcitationPattern: Pauli-limited mode holds more than one particle");
    }
    if (algebra == BetheAlgebra::kSu2q && (n_up[k] > q || n_down[k] > q)) {
      throw NumericalError("ExcitationPattern: occupation exceeds the flavour count");
    }
    up += n_up[k];
    down += n_down[k];
  }
  if (up != down) {
    throw NumericalError("ExcitationPattern: species totals must balance");
  }
  if (pairs != q - up) {
    throw NumericalError("ExcitationPattern: pairs must equal q - (unpaired per species)");
  }
  if (pairs < 0) throw NumericalError("ExcitationPattern: more unpaired particles than copies");
}

double BetheRoots::max_residual() const {
  double m = 0.0;
  for (const double r : residuals) m = std::max(m, std::abs(r));
  return m;
}

double gap_certificate(int length, double sigma) {
  if (length <= 2) throw DimensionError("gap_certificate: length > 2 required");
  const double s = std::sin(M_PI / length);
  return 8.0 / (sigma * length) * s * s;
}

namespace {

struct Level {
  std::vector<double> pole_z;  // ascending, strictly positive weights
  std::vector<double> pole_w;

  double span_lo() const { return pole_z.front(); }
  double span_hi() const { return pole_z.back(); }
};

/// Root-root convention: F_{ja} = sum_p w/(w_ja - z_p) - sum C_ij/(w_ja - w_ib).
struct RationalSystem {
  std::vector<Level> levels;
  RMatrix coupling;
};

Level merge_poles(std::vector<std::pair<double, double>> raw) {
  std::sort(raw.begin(), raw.end());
  Level level;
  for (const auto& [z, w] : raw) {
    if (!level.pole_z.empty() && std::abs(z - level.pole_z.back()) < 1e-10 * std::abs(z)) {
      level.pole_w.back() += w;
    } else {
      level.pole_z.push_back(z);
      level.pole_w.push_back(w);
    }
  }
  // drop zero-weight poles (fully blocked by occupations)
  Level cleaned;
  for (std::size_t p = 0; p < level.pole_z.size(); ++p) {
    if (level.pole_w[p] > 1e-12) {
      cleaned.pole_z.push_back(level.pole_z[p]);
      cleaned.pole_w.push_back(level.pole_w[p]);
    }
  }
  return cleaned;
}

int mu_weight(const ExcitationPattern& pattern, int q, int k, int j) {
  // k = 1..L-1 pole index, j = 1..2q-1 level; exclusive highest-weight cases.
  const auto idx = static_cast<std::size_t>(k - 1);
  const int nu = pattern.n_up[idx];
  const int nd = pattern.n_down[idx];
  if (nu == 0 && nd == 0) return j == q ? 1 : 0;
  if (nu > 0) return j == q + nu ? 1 : 0;
  return j == q - nd ? 1 : 0;
}

RationalSystem single_level_system(BetheAlgebra algebra, const GaudinCouplings& c,
                                   const ExcitationPattern& pattern) {
  std::vector<std::pair<double, double>> raw;
  raw.emplace_back(0.0, 1.0);
  for (std::size_t k = 0; k < c.g.size(); ++k) {
    const double z = 2.0 / c.g[k];
    const double w = algebra == BetheAlgebra::kSu11 ? pattern.total(k) + 1.0
                                                    : 1.0 - pattern.total(k);
    raw.emplace_back(z, w);
  }
  RationalSystem sys;
  sys.levels.push_back(merge_poles(std::move(raw)));
  sys.coupling = RMatrix::Constant(1, 1, algebra == BetheAlgebra::kSu11 ? -2.0 : 2.0);
  return sys;
}

RationalSystem nested_system(const BetheProblem& problem) {
  RationalSystem sys;
  sys.coupling = problem.cartan;
  for (int j = 1; j <= problem.levels; ++j) {
    std::vector<std::pair<double, double>> raw;
    for (Index k = 0; k < static_cast<Index>(problem.z.size()); ++k) {
      raw.emplace_back(problem.z[static_cast<std::size_t>(k)],
                       static_cast<double>(problem.mu(k, j - 1)));
    }
    sys.levels.push_back(merge_poles(std::move(raw)));
  }
  return sys;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& omega) {
  std::vector<double> x;
  for (const auto& level : omega) x.insert(x.end(), level.begin(), level.end());
  return x;
}

std::vector<std::vector<double>> unflatten(const std::vector<double>& x,
                                           const std::vector<int>& counts) {
  std::vector<std::vector<double>> omega;
  std::size_t p = 0;
  for (const int m : counts) {
    omega.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(p),
                       x.begin() + static_cast<std::ptrdiff_t>(p + static_cast<std::size_t>(m)));
    p += static_cast<std::size_t>(m);
  }
  return omega;
}

std::vector<double> residuals_at(const RationalSystem& sys, const std::vector<int>& counts,
                                 const std::vector<double>& x) {
  std::vector<double> f(x.size(), 0.0);
  std::vector<std::size_t> offset(counts.size() + 1, 0);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    offset[j + 1] = offset[j] + static_cast<std::size_t>(counts[j]);
  }
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const Level& level = sys.levels[j];
    for (int a = 0; a < counts[j]; ++a) {
      const std::size_t ia = offset[j] + static_cast<std::size_t>(a);
      const double w = x[ia];
      double acc = 0.0;
      for (std::size_t p = 0; p < level.pole_z.size(); ++p) {
        acc += level.pole_w[p] / (w - level.pole_z[p]);
      }
      for (std::size_t i = 0; i < counts.size(); ++i) {
        const double cij = sys.coupling(static_cast<Index>(i), static_cast<Index>(j));
        if (cij == 0.0) continue;
        for (int b = 0; b < counts[i]; ++b) {
          const std::size_t ib = offset[i] + static_cast<std::size_t>(b);
          if (ib == ia) continue;
          acc -= cij / (w - x[ib]);
        }
      }
      f[ia] = acc;
    }
  }
  return f;
}

RMatrix jacobian_at(const RationalSystem& sys, const std::vector<int>& counts,
                    const std::vector<double>& x) {
  const auto n = static_cast<Index>(x.size());
  RMatrix jac = RMatrix::Zero(n, n);
  std::vector<std::size_t> offset(counts.size() + 1, 0);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    offset[j + 1] = offset[j] + static_cast<std::size_t>(counts[j]);
  }
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const Level& level = sys.levels[j];
    for (int a = 0; a < counts[j]; ++a) {
      const auto ia = static_cast<Index>(offset[j] + static_cast<std::size_t>(a));
      const double w = x[static_cast<std::size_t>(ia)];
      double diag = 0.0;
      for (std::size_t p = 0; p < level.pole_z.size(); ++p) {
        const double dz = w - level.pole_z[p];
        diag -= level.pole_w[p] / (dz * dz);
      }
      for (std::size_t i = 0; i < counts.size(); ++i) {
        const double cij = sys.coupling(static_cast<Index>(i), static_cast<Index>(j));
        if (cij == 0.0) continue;
        for (int b = 0; b < counts[i]; ++b) {
          const auto ib = static_cast<Index>(offset[i] + static_cast<std::size_t>(b));
          if (ib == ia) continue;
          const double dw = w - x[static_cast<std::size_t>(ib)];
          const double second = cij / (dw * dw);
          diag += second;
          jac(ia, ib) = -second;
        }
      }
      jac(ia, ia) = diag;
    }
  }
  return jac;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

constexpr double kResidualTol = 1e-12;
constexpr int kMaxNewton = 500;

bool step_admissible(const RationalSystem& sys, const std::vector<int>& counts,
                     const std::vector<double>& x) {
  std::size_t p = 0;
  double span = 0.0;
  for (const auto& level : sys.levels) {
    if (!level.pole_z.empty()) span = std::max(span, level.span_hi() - level.span_lo());
  }
  const double min_gap = 1e-13 * std::max(span, 1.0);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const Level& level = sys.levels[j];
    for (int a = 0; a < counts[j]; ++a, ++p) {
      const double w = x[p];
      if (!std::isfinite(w)) return false;
      if (!level.pole_z.empty() &&
          (w <= level.span_lo() + min_gap || w >= level.span_hi() - min_gap)) {
        return false;  // confinement between the extreme poles of the level
      }
      for (std::size_t pp = 0; pp < level.pole_z.size(); ++pp) {
        if (std::abs(w - level.pole_z[pp]) < min_gap) return false;
      }
    }
  }
  for (std::size_t a = 0; a < x.size(); ++a) {
    for (std::size_t b = a + 1; b < x.size(); ++b) {
      if (std::abs(x[a] - x[b]) < min_gap) return false;
    }
  }
  return true;
}

struct NewtonResult {
  std::vector<double> x;
  std::vector<double> residuals;
  int iterations = 0;
  bool converged = false;
};

NewtonResult damped_newton(const RationalSystem& sys, const std::vector<int>& counts,
                           std::vector<double> x) {
  NewtonResult result;
  if (!step_admissible(sys, counts, x)) {
    result.x = std::move(x);
    return result;
  }
  std::vector<double> f = residuals_at(sys, counts, x);
  for (int it = 0; it < kMaxNewton; ++it) {
    const double fnorm = max_abs(f);
    if (fnorm <= kResidualTol) {
      result.converged = true;
      break;
    }
    const RMatrix jac = jacobian_at(sys, counts, x);
    Eigen::Map<const RVector> fv(f.data(), static_cast<Index>(f.size()));
    const RVector step = jac.fullPivLu().solve(-fv);
    if (!step.allFinite()) break;
    double damping = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      std::vector<double> trial = x;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += damping * step(static_cast<Index>(i));
      if (step_admissible(sys, counts, trial)) {
        const std::vector<double> ftrial = residuals_at(sys, counts, trial);
        if (max_abs(ftrial) < fnorm || damping < 1e-6) {
          x = std::move(trial);
          f = ftrial;
          accepted = true;
          break;
        }
      }
      damping *= 0.5;
    }
    result.iterations = it + 1;
    if (!accepted) break;
  }
  if (!result.converged && max_abs(f) <= kResidualTol && !x.empty()) result.converged = true;
  if (x.empty()) result.converged = true;
  result.x = std::move(x);
  result.residuals = residuals_at(sys, counts, result.x);
  return result;
}

/// Seed positions for `count` roots inside each inter-pole gap given by
/// layout[g] (gaps between consecutive poles of the level).
std::vector<double> seeds_from_layout(const Level& level, const RootLayout& layout,
                                      std::uint64_t jitter_stream) {
  Rng rng(jitter_stream);
  std::vector<double> seeds;
  for (std::size_t gapi = 0; gapi + 1 < level.pole_z.size(); ++gapi) {
    const int m = gapi < layout.size() ? layout[gapi] : 0;
    const double lo = level.pole_z[gapi];
    const double hi = level.pole_z[gapi + 1];
    for (int r = 0; r < m; ++r) {
      const double frac = static_cast<double>(r + 1) / (m + 1);
      const double jitter = 1e-3 * (hi - lo) * (rng.uniform01() - 0.5);
      seeds.push_back(lo + frac * (hi - lo) + jitter);
    }
  }
  return seeds;
}

std::vector<RootLayout> all_layouts(int gaps, int roots) {
  std::vector<RootLayout> out;
  if (gaps <= 0) return out;
  RootLayout acc(static_cast<std::size_t>(gaps), 0);
  std::function<void(int, int)> rec = [&](int gap, int remaining) {
    if (gap == gaps - 1) {
      acc[static_cast<std::size_t>(gap)] = remaining;
      out.push_back(acc);
      return;
    }
    for (int m = 0; m <= remaining; ++m) {
      acc[static_cast<std::size_t>(gap)] = m;
      rec(gap + 1, remaining - m);
    }
  };
  rec(0, roots);
  return out;
}

struct SolveOutcome {
  BetheRoots roots;
  bool ok = false;
  double best_residual = std::numeric_limits<double>::infinity();
};

SolveOutcome solve_system(const RationalSystem& sys, const std::vector<int>& counts,
                          const std::vector<std::optional<RootLayout>>& layouts) {
  SolveOutcome outcome;
  const int total_roots = std::accumulate(counts.begin(), counts.end(), 0);
  if (total_roots == 0) {
    outcome.ok = true;
    outcome.roots.omega.assign(counts.size(), {});
    outcome.best_residual = 0.0;
    return outcome;
  }
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] > 0 && sys.levels[j].pole_z.size() < 2) {
      throw NumericalError("bethe: level has no confining pole interval for its roots");
    }
  }

  // candidate layouts per level: explicit one if given, otherwise all
  // compositions of the root count over the gaps
  std::vector<std::vector<RootLayout>> candidates(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const int gaps = std::max(0, static_cast<int>(sys.levels[j].pole_z.size()) - 1);
    if (j < layouts.size() && layouts[j].has_value()) {
      const RootLayout& layout = *layouts[j];
      if (static_cast<int>(layout.size()) != gaps ||
          std::accumulate(layout.begin(), layout.end(), 0) != counts[j]) {
        throw DimensionError("bethe: layout must place exactly the root count over the gaps");
      }
      candidates[j] = {layout};
    } else if (counts[j] == 0) {
      candidates[j] = {RootLayout(static_cast<std::size_t>(gaps), 0)};
    } else {
      candidates[j] = all_layouts(gaps, counts[j]);
    }
  }

  // Cartesian walk over per-level layout candidates with jittered restarts.
  std::vector<std::size_t> cursor(counts.size(), 0);
  auto advance = [&]() {
    for (std::size_t j = 0; j < cursor.size(); ++j) {
      if (++cursor[j] < candidates[j].size()) return true;
      cursor[j] = 0;
    }
    return false;
  };
  do {
    for (int restart = 0; restart < 4; ++restart) {
      std::vector<double> x;
      for (std::size_t j = 0; j < counts.size(); ++j) {
        const auto seeds =
            seeds_from_layout(sys.levels[j], candidates[j][cursor[j]],
                              0x9e37ULL + 131 * static_cast<std::uint64_t>(restart) + j);
        x.insert(x.end(), seeds.begin(), seeds.end());
      }
      NewtonResult nr = damped_newton(sys, counts, std::move(x));
      if (!nr.residuals.empty()) {
        outcome.best_residual = std::min(outcome.best_residual, max_abs(nr.residuals));
      }
      if (nr.converged) {
        outcome.ok = true;
        outcome.roots.omega = unflatten(nr.x, counts);
        outcome.roots.residuals = nr.residuals;
        outcome.roots.iterations = nr.iterations;
        return outcome;
      }
    }
  } while (advance());
  return outcome;
}

double su_single_eigenvalue(const GaudinCouplings& c, const ExcitationPattern& pattern,
                            const std::vector<double>& omega) {
  double acc = 0.0;
  for (std::size_t k = 0; k < c.g.size(); ++k) acc += c.g[k] * pattern.total(k);
  for (const double w : omega) acc += 4.0 / w;
  return -2.0 / c.sigma * acc;
}

BetheSolution solve_single(BetheAlgebra algebra, const GaudinCouplings& c,
                           const ExcitationPattern& pattern, int nonzero_roots,
                           const std::optional<RootLayout>& layout, int q) {
  pattern.validate(algebra, c.L, q);
  if (nonzero_roots < 0 || nonzero_roots > pattern.pairs) {
    throw NumericalError("bethe: non-zero root count must lie in [0, pairs]");
  }
  const RationalSystem sys = single_level_system(algebra, c, pattern);
  const SolveOutcome outcome = solve_system(sys, {nonzero_roots}, {layout});
  if (!outcome.ok) {
    throw NumericalError("bethe: solver failed to converge; best residual " +
                         std::to_string(outcome.best_residual));
  }
  BetheSolution sol;
  sol.roots = outcome.roots;
  sol.eigenvalue = su_single_eigenvalue(c, pattern, sol.roots.omega[0]);
  return sol;
}

}  // namespace

BetheSolution solve_su11(const GaudinCouplings& c, const ExcitationPattern& pattern,
                         int nonzero_roots, const std::optional<RootLayout>& layout) {
  const int q = pattern.pairs + pattern.total_unpaired() / 2;
  return solve_single(BetheAlgebra::kSu11, c, pattern, nonzero_roots, layout, q);
}

BetheSolution solve_su2(const GaudinCouplings& c, const ExcitationPattern& pattern,
                        int nonzero_roots, const std::optional<RootLayout>& layout) {
  const int q = pattern.pairs + pattern.total_unpaired() / 2;
  return solve_single(BetheAlgebra::kSu2, c, pattern, nonzero_roots, layout, q);
}

BetheProblem build_su2q_problem(const GaudinCouplings& c, int q, const ExcitationPattern& pattern) {
  pattern.validate(BetheAlgebra::kSu2q, c.L, q);
  BetheProblem problem;
  problem.couplings = c;
  problem.q = q;
  problem.levels = 2 * q - 1;
  problem.pattern = pattern;
  problem.z.resize(static_cast<std::size_t>(c.L));
  problem.z[0] = 0.0;
  for (int k = 1; k < c.L; ++k) {
    problem.z[static_cast<std::size_t>(k)] = 2.0 / c.g[static_cast<std::size_t>(k - 1)];
  }
  problem.mu.resize(c.L, problem.levels);
  for (int j = 1; j <= problem.levels; ++j) {
    problem.mu(0, j - 1) = j == q ? 1 : 0;
    for (int k = 1; k < c.L; ++k) {
      problem.mu(k, j - 1) = mu_weight(pattern, q, k, j);
    }
  }
  problem.cartan = RMatrix::Zero(problem.levels, problem.levels);
  for (int j = 0; j < problem.levels; ++j) {
    problem.cartan(j, j) = 2.0;
    if (j > 0) problem.cartan(j, j - 1) = -1.0;
    if (j + 1 < problem.levels) problem.cartan(j, j + 1) = -1.0;
  }
  return problem;
}

BetheSolution solve_su2q(const BetheProblem& problem, const std::vector<int>& root_counts,
                         const std::vector<std::optional<RootLayout>>& layouts) {
  if (static_cast<int>(root_counts.size()) != problem.levels) {
    throw DimensionError("solve_su2q: one root count per level required");
  }
  const RationalSystem sys = nested_system(problem);
  const SolveOutcome outcome = solve_system(sys, root_counts, layouts);
  if (!outcome.ok) {
    throw NumericalError("solve_su2q: solver failed to converge; best residual " +
                         std::to_string(outcome.best_residual));
  }

  // F = C^{-1} for simple-laced roots; the q-th row must come out as
  // F_{qj} = min(j, 2q-j)/2, which we recompute rather than assume.
  const RMatrix f_matrix = problem.cartan.inverse();
  const int q = problem.q;
  for (int j = 1; j <= problem.levels; ++j) {
    const double expected = 0.5 * std::min(j, 2 * q - j);
    if (std::abs(f_matrix(q - 1, j - 1) - expected) > 1e-10) {
      throw NumericalError("solve_su2q: Cartan inverse row deviates from the closed form");
    }
  }

  double pole_part = 0.0;
  for (int k = 1; k < problem.couplings.L; ++k) {
    double fw = 0.0;
    for (int j = 1; j <= problem.levels; ++j) {
      fw += f_matrix(q - 1, j - 1) * problem.mu(k, j - 1);
    }
    pole_part += fw / problem.z[static_cast<std::size_t>(k)];
  }
  double root_part = 0.0;
  for (const double w : outcome.roots.omega[static_cast<std::size_t>(q - 1)]) {
    root_part += 1.0 / w;
  }
  BetheSolution sol;
  sol.roots = outcome.roots;
  const double sigma = problem.couplings.sigma;
  sol.eigenvalue = -2.0 * q / sigma + 8.0 / sigma * (pole_part - root_part);
  return sol;
}

double electrostatic_energy(const BetheProblem& problem,
                            const std::vector<std::vector<double>>& omega) {
  const RationalSystem sys = nested_system(problem);
  double w_total = 0.0;
  for (std::size_t j = 0; j < omega.size(); ++j) {
    for (const double w : omega[j]) {
      for (std::size_t p = 0; p < sys.levels[j].pole_z.size(); ++p) {
        w_total -= sys.levels[j].pole_w[p] * std::log(std::abs(w - sys.levels[j].pole_z[p]));
      }
    }
  }
  for (std::size_t j = 0; j < omega.size(); ++j) {
    for (std::size_t a = 0; a < omega[j].size(); ++a) {
      for (std::size_t i = 0; i < omega.size(); ++i) {
        for (std::size_t b = 0; b < omega[i].size(); ++b) {
          if (i < j || (i == j && b <= a)) continue;
          w_total += sys.coupling(static_cast<Index>(i), static_cast<Index>(j)) *
                     std::log(std::abs(omega[j][a] - omega[i][b]));
        }
      }
    }
  }
  return w_total;
}

std::vector<double> electrostatic_gradient(const BetheProblem& problem,
                                           const std::vector<std::vector<double>>& omega) {
  const RationalSystem sys = nested_system(problem);
  std::vector<int> counts;
  for (const auto& level : omega) counts.push_back(static_cast<int>(level.size()));
  auto f = residuals_at(sys, counts, flatten(omega));
  for (double& v : f) v = -v;  // grad W = -F
  return f;
}

double electrostatic_energy(BetheAlgebra algebra, const GaudinCouplings& c,
                            const ExcitationPattern& pattern, const std::vector<double>& omega) {
  if (algebra == BetheAlgebra::kSu2q) {
    throw DimensionError("electrostatic_energy: use the BetheProblem overload for the nested case");
  }
  const RationalSystem sys = single_level_system(algebra, c, pattern);
  double w_total = 0.0;
  for (const double w : omega) {
    for (std::size_t p = 0; p < sys.levels[0].pole_z.size(); ++p) {
      w_total -= sys.levels[0].pole_w[p] * std::log(std::abs(w - sys.levels[0].pole_z[p]));
    }
  }
  for (std::size_t a = 0; a < omega.size(); ++a) {
    for (std::size_t b = a + 1; b < omega.size(); ++b) {
      w_total += sys.coupling(0, 0) * std::log(std::abs(omega[a] - omega[b]));
    }
  }
  return w_total;
}

std::vector<double> electrostatic_gradient(BetheAlgebra algebra, const GaudinCouplings& c,
                                           const ExcitationPattern& pattern,
                                           const std::vector<double>& omega) {
  const RationalSystem sys = single_level_system(algebra, c, pattern);
  auto f = residuals_at(sys, {static_cast<int>(omega.size())}, omega);
  for (double& v : f) v = -v;
  return f;
}

BetheRoots electrostatic_relax(const BetheProblem& problem, const std::vector<int>& root_counts,
                               const std::vector<std::vector<double>>& seeds) {
  const RationalSystem sys = nested_system(problem);
  std::vector<double> x = flatten(seeds);
  const int n = static_cast<int>(x.size());
  if (n == 0) {
    BetheRoots roots;
    roots.omega.assign(root_counts.size(), {});
    return roots;
  }
  double span = 1.0;
  for (const auto& level : sys.levels) {
    if (level.pole_z.size() > 1) span = std::max(span, level.span_hi() - level.span_lo());
  }
  const double collision_tol = 1e-13 * span;
  constexpr int kMaxRestarts = 20;
  constexpr int kMaxSteps = 50000;
  Rng rng(0xe1ecULL);
  std::vector<double> best = x;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart <= kMaxRestarts; ++restart) {
    int iterations = 0;
    bool collided = false;
    for (; iterations < kMaxSteps; ++iterations) {
      std::vector<double> f = residuals_at(sys, root_counts, x);
      const double fnorm = max_abs(f);
      if (fnorm < best_norm) {
        best_norm = fnorm;
        best = x;
      }
      if (fnorm <= 1e-10) {
        BetheRoots roots;
        roots.omega = unflatten(x, root_counts);
        roots.residuals = std::move(f);
        roots.iterations = iterations;
        return roots;
      }
      // descend the electrostatic energy: grad W = -F
      double step = 0.25 * span / std::max(1.0, fnorm);
      bool moved = false;
      for (int half = 0; half < 60; ++half) {
        std::vector<double> trial = x;
        for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += step * f[i];
        if (step_admissible(sys, root_counts, trial)) {
          const double tnorm = max_abs(residuals_at(sys, root_counts, trial));
          if (tnorm < fnorm) {
            x = std::move(trial);
            moved = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!moved) break;
      // collision check
      for (std::size_t a = 0; a < x.size() && !collided; ++a) {
        for (std::size_t b = a + 1; b < x.size(); ++b) {
          if (std::abs(x[a] - x[b]) < collision_tol) {
            collided = true;
            break;
          }
        }
      }
      if (collided) break;
    }
    // restart from jittered seeds
    x = flatten(seeds);
    for (double& v : x) v += 1e-3 * span * (rng.uniform01() - 0.5);
  }
  throw NumericalError("electrostatic_relax: no stationary point found; best residual " +
                       std::to_string(best_norm));
}

std::vector<ExcitationPattern> enumerate_patterns(BetheAlgebra algebra, int length, int q,
                                                  int max_unpaired, int max_pairs) {
  const int modes = length - 1;
  std::vector<ExcitationPattern> out;
  const int per_mode_cap = algebra == BetheAlgebra::kSu2 ? 1 : (algebra == BetheAlgebra::kSu2q ? q : 2 * q);
  // enumerate per-species occupations with equal totals s, sum 2s <= caps
  const int max_s = std::min({max_unpaired / 2, q});
  std::vector<std::vector<int>> configs;  // occupations of one species
  std::vector<int> acc(static_cast<std::size_t>(modes), 0);
  std::function<void(int, int)> rec = [&](int mode, int remaining) {
    if (mode == modes) {
      if (remaining == 0) configs.push_back(acc);
      return;
    }
    for (int n = 0; n <= std::min(per_mode_cap, remaining); ++n) {
      acc[static_cast<std::size_t>(mode)] = n;
      rec(mode + 1, remaining - n);
    }
    acc[static_cast<std::size_t>(mode)] = 0;
  };
  for (int s = 0; s <= max_s; ++s) {
    configs.clear();
    rec(0, s);
    for (const auto& up : configs) {
      for (const auto& down : configs) {
        bool mixed = false;
        int total = 0;
        for (int k = 0; k < modes; ++k) {
          if (up[static_cast<std::size_t>(k)] > 0 && down[static_cast<std::size_t>(k)] > 0) {
            mixed = true;
            break;
          }
          total += up[static_cast<std::size_t>(k)] + down[static_cast<std::size_t>(k)];
          if (algebra == BetheAlgebra::kSu2 &&
              up[static_cast<std::size_t>(k)] + down[static_cast<std::size_t>(k)] > 1) {
            mixed = true;
            break;
          }
        }
        if (mixed || total > max_unpaired) continue;
        ExcitationPattern pattern;
        pattern.n_up = up;
        pattern.n_down = down;
        pattern.pairs = q - s;
        if (pattern.pairs < 0) continue;
        if (algebra == BetheAlgebra::kSu2 && pattern.pairs + s > length) continue;
        try {
          pattern.validate(algebra, length, q);
        } catch (const Error&) {
          continue;
        }
        out.push_back(std::move(pattern));
      }
    }
  }
  (void)max_pairs;
  return out;
}

GapSearchResult enumerate_gap(BetheAlgebra algebra, int length, int q, double sigma) {
  const GaudinCouplings c = make_gaudin_couplings(length, sigma);
  GapSearchResult result;
  std::vector<std::pair<int, double>> tagged;  // (excitation weight, |lambda|)

  auto record = [&](int excitations, double lambda) {
    for (const double seen : result.eigenvalues) {
      if (std::abs(seen - lambda) <= 1e-9 * std::max(1.0, std::abs(lambda))) return;
    }
    result.eigenvalues.push_back(lambda);
    if (std::abs(lambda) > 1e-12) tagged.emplace_back(excitations, std::abs(lambda));
  };

  constexpr int kMaxRoots = 2;
  for (const auto& pattern : enumerate_patterns(algebra, length, q)) {
    const int max_roots = std::min(pattern.pairs, kMaxRoots);
    for (int m = 0; m <= max_roots; ++m) {
      const int excitations = pattern.total_unpaired() + 2 * m;
      if (algebra == BetheAlgebra::kSu2q) {
        const BetheProblem problem = build_su2q_problem(c, q, pattern);
        std::vector<int> counts(static_cast<std::size_t>(problem.levels), 0);
        counts[static_cast<std::size_t>(q - 1)] = m;
        try {
          const BetheSolution sol = solve_su2q(problem, counts);
          record(excitations, sol.eigenvalue);
        } catch (const NumericalError&) {
          // no real solution for this configuration; skip
        }
        continue;
      }
      // walk every inter-pole layout so distinct root configurations of the
      // same pattern are all collected
      const RationalSystem sys = single_level_system(algebra, c, pattern);
      const int gaps = std::max(0, static_cast<int>(sys.levels[0].pole_z.size()) - 1);
      std::vector<RootLayout> layouts =
          m == 0 ? std::vector<RootLayout>{RootLayout(static_cast<std::size_t>(gaps), 0)}
                 : all_layouts(gaps, m);
      for (const auto& layout : layouts) {
        try {
          const BetheSolution sol = algebra == BetheAlgebra::kSu11
                                        ? solve_su11(c, pattern, m, layout)
                                        : solve_su2(c, pattern, m, layout);
          record(excitations, sol.eigenvalue);
        } catch (const NumericalError&) {
        }
        if (m == 0) break;
      }
    }
  }

  double min_gap = std::numeric_limits<double>::infinity();
  for (const auto& [exc, mag] : tagged) min_gap = std::min(min_gap, mag);
  result.min_gap = std::isfinite(min_gap) ? min_gap : 0.0;

  // |lambda| should not decrease when excitations are added
  std::map<int, double> min_by_class;
  for (const auto& [exc, mag] : tagged) {
    const auto it = min_by_class.find(exc);
    if (it == min_by_class.end() || mag < it->second) min_by_class[exc] = mag;
  }
  double prev = 0.0;
  for (const auto& [exc, mag] : min_by_class) {
    if (mag < prev - 1e-12) result.monotonicity_flag = true;
    prev = std::max(prev, mag);
  }
  return result;
}

}  // namespace haarmix
