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

#include "haarmix/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "haarmix/parallel.hpp"

namespace haarmix {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

PulseProcess PulseProcess::chain_defaults(int length, std::uint64_t seed) {
  PulseProcess p;
  p.kind = Kind::kTones;
  p.tones = 100;
  p.amp_min = -0.5;
  p.amp_max = 0.5;
  p.freq_min = -static_cast<double>(length);
  p.freq_max = static_cast<double>(length);
  p.phase_min = -static_cast<double>(length);
  p.phase_max = static_cast<double>(length);
  p.seed = seed;
  return p;
}

PulseProcess PulseProcess::white_noise(double sigma, std::uint64_t seed) {
  PulseProcess p;
  p.kind = Kind::kWhiteNoise;
  p.white_sigma = sigma;
  p.seed = seed;
  return p;
}

std::optional<double> PulseProcess::correlation(double s) const {
  if (kind == Kind::kWhiteNoise) return std::nullopt;
  if (std::abs(phase_max - phase_min - kTwoPi) > 1e-9) return std::nullopt;
  const double amp_sq = (amp_max * amp_max + amp_max * amp_min + amp_min * amp_min) / 3.0;
  double freq_mean;
  if (std::abs(s) < 1e-300) {
    freq_mean = 1.0;
  } else if (std::abs(freq_max - freq_min) < 1e-300) {
    freq_mean = std::cos(freq_min * s);
  } else {
    freq_mean = (std::sin(freq_max * s) - std::sin(freq_min * s)) / ((freq_max - freq_min) * s);
  }
  return 0.5 * tones * amp_sq * freq_mean;
}

std::optional<double> PulseProcess::sigma_eff_closed_form() const {
  if (kind == Kind::kWhiteNoise) return white_sigma;
  if (std::abs(phase_max - phase_min - kTwoPi) > 1e-9) return std::nullopt;
  // symmetric frequency window [-W, W]: 2 int_0^inf c = K E[A^2] pi / (2 W)
  if (std::abs(freq_max + freq_min) > 1e-12) return std::nullopt;
  const double w = freq_max;
  if (w <= 0.0) return std::nullopt;
  const double amp_sq = (amp_max * amp_max + amp_max * amp_min + amp_min * amp_min) / 3.0;
  return tones * amp_sq * M_PI / (2.0 * w);
}

double Pulse::operator()(double t) const {
  if (white) return white_value;
  double g = 0.0;
  for (std::size_t k = 0; k < amplitude.size(); ++k) {
    g += amplitude[k] * std::cos(frequency[k] * t + phase[k]);
  }
  return g;
}

Pulse sample_pulse(const PulseProcess& process, Rng& rng) {
  Pulse pulse;
  if (process.kind == PulseProcess::Kind::kWhiteNoise) {
    pulse.white = true;
    pulse.white_value = 0.0;
    return pulse;
  }
  if (process.tones < 1) throw NumericalError("sample_pulse: at least one tone required");
  pulse.amplitude.resize(static_cast<std::size_t>(process.tones));
  pulse.frequency.resize(static_cast<std::size_t>(process.tones));
  pulse.phase.resize(static_cast<std::size_t>(process.tones));
  for (int k = 0; k < process.tones; ++k) {
    pulse.amplitude[static_cast<std::size_t>(k)] = rng.uniform(process.amp_min, process.amp_max);
    pulse.frequency[static_cast<std::size_t>(k)] = rng.uniform(process.freq_min, process.freq_max);
    pulse.phase[static_cast<std::size_t>(k)] = rng.uniform(process.phase_min, process.phase_max);
  }
  return pulse;
}

namespace {

// Stepper caching the real-symmetric fast path; H + g V is re-diagonalized
// every step, so the only reuse is the decision and the scratch storage.
class MidpointStepper {
 public:
  MidpointStepper(const SystemSpec& sys, double dt)
      : sys_(sys),
        dt_(dt),
        real_path_(sys.H.imag().cwiseAbs().maxCoeff() < 1e-14 &&
                   sys.V.imag().cwiseAbs().maxCoeff() < 1e-14),
        h_real_(sys.H.real()),
        v_real_(sys.V.real()) {}

  void apply(double g, CMatrix& u) const {
    const Index d = sys_.dim;
    if (real_path_) {
      Eigen::SelfAdjointEigenSolver<RMatrix> es;
      es.compute(h_real_ + g * v_real_);
      const RMatrix& w = es.eigenvectors();
      CVector phases(d);
      for (Index i = 0; i < d; ++i) phases(i) = std::exp(-kI * dt_ * es.eigenvalues()(i));
      u = (w * phases.asDiagonal() * w.transpose()).cast<Complex>() * u;
    } else {
      Eigen::SelfAdjointEigenSolver<CMatrix> es;
      es.compute(sys_.H + g * sys_.V);
      const CMatrix& w = es.eigenvectors();
      CVector phases(d);
      for (Index i = 0; i < d; ++i) phases(i) = std::exp(-kI * dt_ * es.eigenvalues()(i));
      u = w * phases.asDiagonal() * w.adjoint() * u;
    }
  }

 private:
  const SystemSpec& sys_;
  double dt_;
  bool real_path_;
  RMatrix h_real_;
  RMatrix v_real_;
};

double unitarity_residual(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

Trajectory propagate(const SystemSpec& sys, const std::function<double(double)>& g, double T,
                     double dt) {
  if (dt <= 0.0 || T < 0.0) throw NumericalError("propagate: T >= 0 and dt > 0 required");
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-12));
  const double step_dt = steps > 0 ? T / static_cast<double>(steps) : dt;
  MidpointStepper stepper(sys, step_dt);
  Trajectory traj;
  traj.U = CMatrix::Identity(sys.dim, sys.dim);
  traj.times.reserve(static_cast<std::size_t>(steps) + 1);
  traj.g_values.reserve(static_cast<std::size_t>(steps) + 1);
  for (long s = 0; s < steps; ++s) {
    const double t_mid = (static_cast<double>(s) + 0.5) * step_dt;
    const double gv = g(t_mid);
    traj.times.push_back(t_mid);
    traj.g_values.push_back(gv);
    stepper.apply(gv, traj.U);
  }
  traj.unitarity_drift = unitarity_residual(traj.U);
  if (traj.unitarity_drift > 1e-6) {
    throw NumericalError("propagate: unitarity drift " + std::to_string(traj.unitarity_drift) +
                         "; decrease dt");
  }
  return traj;
}

Trajectory propagate_pulse(const SystemSpec& sys, const Pulse& pulse, double T, double dt,
                           Rng& rng) {
  if (!pulse.white) {
    return propagate(
        sys, [&pulse](double t) { return pulse(t); }, T, dt);
  }
  // white noise: an independent value with variance sigma/dt on each step
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-12));
  const double step_dt = steps > 0 ? T / static_cast<double>(steps) : dt;
  const double scale = std::sqrt(pulse.white_sigma / step_dt);
  std::vector<double> values(static_cast<std::size_t>(std::max<long>(steps, 0)));
  for (auto& v : values) v = scale * rng.gaussian();
  std::size_t cursor = 0;
  return propagate(
      sys,
      [&values, &cursor](double) {
        return cursor < values.size() ? values[cursor++] : 0.0;
      },
      T, dt);
}

namespace {

CMatrix q_copy_channel(const CMatrix& u, int q) {
  CMatrix uq = u;
  for (int k = 1; k < q; ++k) uq = kron(uq, u);
  return kron(uq, uq.conjugate());
}

}  // namespace

Ensemble ensemble_average(const SystemSpec& sys, const PulseProcess& process, int q, double T,
                          double dt, Index n_samples, int threads, const NumericPolicy& policy) {
  if (n_samples < 1) throw DimensionError("ensemble_average: at least one sample required");
  Index dim = 1;
  for (int k = 0; k < 2 * q; ++k) {
    if (dim > policy.dense_cap / sys.dim) {
      throw DimensionError("ensemble_average: channel dimension exceeds the dense cap");
    }
    dim *= sys.dim;
  }
  // Trajectories are grouped into fixed contiguous blocks; each block is
  // accumulated sequentially in index order and blocks are reduced in order,
  // so the result is bit-identical for every thread count. The per-block
  // means double as the statistical-error sample.
  const Index n_blocks = std::min<Index>(50, n_samples);
  std::vector<CMatrix> partial(static_cast<std::size_t>(n_blocks));
  std::vector<Index> counts(static_cast<std::size_t>(n_blocks), 0);
  for (auto& p : partial) p = CMatrix::Zero(dim, dim);

  const int used_threads = policy.deterministic ? 1 : threads;
  parallel_for_indexed(static_cast<std::size_t>(n_blocks), used_threads, [&](std::size_t b) {
    const Index begin = static_cast<Index>(b) * n_samples / n_blocks;
    const Index end = (static_cast<Index>(b) + 1) * n_samples / n_blocks;
    for (Index i = begin; i < end; ++i) {
      Rng rng = Rng::derive(process.seed, static_cast<std::uint64_t>(i));
      const Pulse pulse = sample_pulse(process, rng);
      const Trajectory traj = propagate_pulse(sys, pulse, T, dt, rng);
      partial[b] += q_copy_channel(traj.U, q);
      ++counts[b];
    }
  });

  Ensemble ens;
  ens.n_samples = n_samples;
  ens.q = q;
  ens.channel_estimate = CMatrix::Zero(dim, dim);
  for (Index b = 0; b < n_blocks; ++b) ens.channel_estimate += partial[static_cast<std::size_t>(b)];
  ens.channel_estimate /= static_cast<double>(n_samples);

  if (n_blocks >= 2 && dim <= 256) {
    ens.block_means.reserve(static_cast<std::size_t>(n_blocks));
    for (Index b = 0; b < n_blocks; ++b) {
      const auto bb = static_cast<std::size_t>(b);
      if (counts[bb] == 0) continue;
      ens.block_means.push_back(partial[bb] / static_cast<double>(counts[bb]));
    }
    const auto nb = static_cast<double>(ens.block_means.size());
    // Frobenius-aggregate standard error of the mean channel
    double var = 0.0;
    for (const auto& bm : ens.block_means) {
      var += (bm - ens.channel_estimate).squaredNorm();
    }
    ens.frobenius_error = std::sqrt(var / (nb * (nb - 1.0)));
    // delete-one-block jackknife of the leading singular value
    std::vector<double> loo;
    loo.reserve(ens.block_means.size());
    for (std::size_t b = 0; b < ens.block_means.size(); ++b) {
      CMatrix rest = CMatrix::Zero(dim, dim);
      for (std::size_t c = 0; c < ens.block_means.size(); ++c) {
        if (c != b) rest += ens.block_means[c];
      }
      rest /= (nb - 1.0);
      loo.push_back(operator_norm(rest));
    }
    double mean = 0.0;
    for (const double v : loo) mean += v;
    mean /= nb;
    double jvar = 0.0;
    for (const double v : loo) jvar += (v - mean) * (v - mean);
    ens.standard_error = std::sqrt((nb - 1.0) / nb * jvar);
  }
  return ens;
}

double estimate_sigma_eff(const PulseProcess& process, Index n_draws, double s_max, double ds) {
  if (process.kind == PulseProcess::Kind::kWhiteNoise) return process.white_sigma;
  const auto lags = static_cast<std::size_t>(std::ceil(s_max / ds));
  std::vector<double> cov(lags, 0.0);
  // average g(t+s) g(t) over draws and a few base times
  const std::vector<double> base_times{0.0, 0.37, 1.13, 2.71};
  for (Index i = 0; i < n_draws; ++i) {
    Rng rng = Rng::derive(process.seed ^ 0xc0ffeeULL, static_cast<std::uint64_t>(i));
    const Pulse pulse = sample_pulse(process, rng);
    for (std::size_t m = 0; m < lags; ++m) {
      const double s = static_cast<double>(m) * ds;
      double acc = 0.0;
      for (const double t : base_times) acc += pulse(t + s) * pulse(t);
      cov[m] += acc / static_cast<double>(base_times.size());
    }
  }
  for (auto& c : cov) c /= static_cast<double>(n_draws);
  // integrate to the first zero crossing (trapezoid)
  double integral = 0.0;
  for (std::size_t m = 0; m + 1 < lags; ++m) {
    if (cov[m + 1] <= 0.0) {
      // linear interpolation to the crossing
      const double frac = cov[m] / (cov[m] - cov[m + 1]);
      integral += 0.5 * cov[m] * frac * ds;
      break;
    }
    integral += 0.5 * (cov[m] + cov[m + 1]) * ds;
  }
  return 2.0 * integral;
}

MarkovReport markov_check(const SystemSpec& sys, const PulseProcess& process, int q,
                          const std::vector<double>& t_grid, Index n_samples, double dt,
                          int threads, const NumericPolicy& policy) {
  MarkovReport report;
  report.times = t_grid;
  report.sigma_eff = estimate_sigma_eff(process, std::min<Index>(n_samples, 2000), 20.0, 0.01);
  SystemSpec effective = sys;
  effective.sigma = report.sigma_eff;
  const LiouvilleanQ lq = build_liouvillean(effective, q, policy);
  for (const double t : t_grid) {
    const Ensemble ens = ensemble_average(sys, process, q, t, dt, n_samples, threads, policy);
    const CMatrix target = expm(t * lq.matrix);
    report.discrepancy.push_back(operator_norm(ens.channel_estimate - target));
    report.standard_error.push_back(ens.frobenius_error);
  }
  return report;
}

CMatrix haar_sample(Index d, Rng& rng) {
  CMatrix ginibre(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      ginibre(i, j) = Complex(rng.gaussian(), rng.gaussian()) / std::sqrt(2.0);
    }
  }
  Eigen::HouseholderQR<CMatrix> qr(ginibre);
  CMatrix q_mat = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    q_mat.col(j) *= mag > 0.0 ? rjj / mag : Complex(1.0, 0.0);
  }
  return q_mat;
}

namespace {

// Canonical unitary with Gamma(w) w = e_1: Householder reflection followed by
// a phase fix on the first row.
CMatrix householder_to_e1(const CVector& w) {
  const Index m = w.size();
  const double norm = w.norm();
  const Complex w0 = w(0);
  const double w0_abs = std::abs(w0);
  const Complex phase = w0_abs > 1e-300 ? w0 / w0_abs : Complex(1.0, 0.0);
  CVector u = w;
  u(0) += phase * norm;
  const double unorm2 = u.squaredNorm();
  CMatrix h = CMatrix::Identity(m, m);
  if (unorm2 > 1e-300) h -= (2.0 / unorm2) * (u * u.adjoint());
  // h * w = -phase * norm * e1; cancel the leftover phase
  CMatrix fix = CMatrix::Identity(m, m);
  fix(0, 0) = -std::conj(phase);
  return fix * h;
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

}  // namespace

RVector angle_decompose(const CMatrix& u) {
  const Index d = u.rows();
  if (u.cols() != d) throw DimensionError("angle_decompose: square unitary required");
  if (unitarity_residual(u) > 1e-8) {
    throw NumericalError("angle_decompose: input is not unitary to 1e-8");
  }
  RVector angles(d * d);
  Index cursor = 0;
  CMatrix current = u;
  for (Index level = 0; level < d; ++level) {
    const Index m = d - level;
    const CVector w = current.col(0);
    // column phases: arg of each component, iid uniform under Haar
    for (Index k = 0; k < m; ++k) angles(cursor++) = wrap_angle(std::arg(w(k)));
    // stick-breaking images of the moduli: Beta(1, m-k-1) CDF values
    double remaining = 1.0;
    for (Index k = 0; k + 1 < m; ++k) {
      const double yk = std::norm(w(k));
      const double tk = remaining > 1e-300 ? std::min(1.0, yk / remaining) : 0.0;
      const double exponent = static_cast<double>(m - k - 1);
      const double u01 = 1.0 - std::pow(1.0 - tk, exponent);
      angles(cursor++) = kTwoPi * std::min(u01, 1.0 - 1e-16);
      remaining -= yk;
    }
    if (m == 1) break;
    const CMatrix gamma = householder_to_e1(w);
    current = (gamma * current).bottomRightCorner(m - 1, m - 1).eval();
  }
  return angles;
}

CMatrix angle_reconstruct(const RVector& angles, Index d) {
  if (angles.size() != d * d) throw DimensionError("angle_reconstruct: d^2 angles required");
  CMatrix current(1, 1);
  // consume levels in reverse: innermost 1x1 block first
  std::vector<std::pair<Index, Index>> level_spans;  // (start, m)
  Index start = 0;
  for (Index level = 0; level < d; ++level) {
    const Index m = d - level;
    level_spans.emplace_back(start, m);
    start += m + std::max<Index>(m - 1, 0);
  }
  current(0, 0) = std::exp(kI * angles(level_spans.back().first));
  for (Index level = d - 2; level >= 0; --level) {
    const auto [base, m] = level_spans[static_cast<std::size_t>(level)];
    // rebuild the first column
    RVector moduli(m);
    double remaining = 1.0;
    for (Index k = 0; k + 1 < m; ++k) {
      const double u01 = angles(base + m + k) / kTwoPi;
      const double exponent = static_cast<double>(m - k - 1);
      const double tk = 1.0 - std::pow(1.0 - u01, 1.0 / exponent);
      const double yk = tk * remaining;
      moduli(k) = std::sqrt(std::max(0.0, yk));
      remaining -= yk;
    }
    moduli(m - 1) = std::sqrt(std::max(0.0, remaining));
    CVector w(m);
    for (Index k = 0; k < m; ++k) {
      w(k) = moduli(k) * std::exp(kI * angles(base + k));
    }
    const CMatrix gamma = householder_to_e1(w);
    CMatrix embedded = CMatrix::Identity(m, m);
    embedded.bottomRightCorner(m - 1, m - 1) = current;
    current = gamma.adjoint() * embedded;
  }
  return current;
}

UniformityHistogram uniformity_histogram(const std::vector<RVector>& samples, int bins) {
  if (samples.size() < 100) {
    throw NumericalError("uniformity_histogram: at least 100 samples required");
  }
  const Index n_angles = samples.front().size();
  UniformityHistogram hist;
  hist.counts = Eigen::MatrixXi::Zero(n_angles, bins);
  for (const auto& sample : samples) {
    if (sample.size() != n_angles) {
      throw DimensionError("uniformity_histogram: inconsistent angle counts");
    }
    for (Index a = 0; a < n_angles; ++a) {
      const double frac = wrap_angle(sample(a)) / kTwoPi;
      Index bin = static_cast<Index>(frac * bins);
      bin = std::clamp<Index>(bin, 0, bins - 1);
      ++hist.counts(a, bin);
    }
  }
  const double expected = static_cast<double>(samples.size()) / bins;
  for (Index a = 0; a < n_angles; ++a) {
    for (int b = 0; b < bins; ++b) {
      const double diff = hist.counts(a, b) - expected;
      hist.chi2 += diff * diff / expected;
    }
  }
  hist.dof = n_angles * (bins - 1);
  return hist;
}

double chi2_quantile(double probability, Index dof) {
  // Wilson-Hilferty cube approximation with a normal quantile via
  // Acklam-style rational fit on the central region.
  auto norm_quantile = [](double p) {
    // Beasley-Springer-Moro
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
      const double q = std::sqrt(-2.0 * std::log(p));
      return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
      const double q = std::sqrt(-2.0 * std::log(1.0 - p));
      return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  };
  const double z = norm_quantile(probability);
  const double k = static_cast<double>(dof);
  const double term = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * term * term * term;
}

ExpanderEstimate expander_distance_mc(const Ensemble& ensemble, const HaarProjector& projector) {
  ExpanderEstimate est;
  const CMatrix diff = ensemble.channel_estimate - projector.projector;
  est.value = operator_norm(diff);
  est.standard_error = ensemble.frobenius_error;
  return est;
}

void save_channel(const std::string& path, const CMatrix& channel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_channel: cannot open " + path);
  const char magic[4] = {'H', 'M', 'C', 'H'};
  out.write(magic, 4);
  const std::uint64_t dim = static_cast<std::uint64_t>(channel.rows());
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  for (Index i = 0; i < channel.rows(); ++i) {
    for (Index j = 0; j < channel.cols(); ++j) {
      const double re = channel(i, j).real();
      const double im = channel(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
}

CMatrix load_channel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_channel: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::string(magic, 4) != "HMCH") throw Error("load_channel: bad magic in " + path);
  std::uint64_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  CMatrix channel(static_cast<Index>(dim), static_cast<Index>(dim));
  for (Index i = 0; i < channel.rows(); ++i) {
    for (Index j = 0; j < channel.cols(); ++j) {
      double re = 0.0, im = 0.0;
      in.read(reinterpret_cast<char*>(&re), sizeof(re));
      in.read(reinterpret_cast<char*>(&im), sizeof(im));
      channel(i, j) = Complex(re, im);
    }
  }
  if (!in) throw Error("load_channel: truncated file " + path);
  return channel;
}

}  // namespace haarmix
