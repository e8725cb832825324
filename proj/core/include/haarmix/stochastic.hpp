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
#include <functional>
#include <optional>
#include <vector>

#include "haarmix/liouville.hpp"
#include "haarmix/model.hpp"
#include "haarmix/rng.hpp"
#include "haarmix/types.hpp"

namespace haarmix {

/// Law of the random control signal. Tonal processes draw K cosines with
/// uniform amplitudes/frequencies/phases; the white-noise law redraws an
/// independent Gaussian value on every integrator step and realizes the
/// Markovian limit exactly as dt -> 0.
struct PulseProcess {
  enum class Kind : std::uint8_t { kTones, kWhiteNoise };
  Kind kind = Kind::kTones;
  int tones = 100;
  double amp_min = -0.5, amp_max = 0.5;
  double freq_min = -5.0, freq_max = 5.0;
  double phase_min = 0.0, phase_max = 6.283185307179586476925287;
  double white_sigma = 1.0;  // target noise strength for the white-noise law
  std::uint64_t seed = 0;

  /// Tonal defaults used for a chain of length L: amplitudes in [-1/2, 1/2],
  /// frequencies and phases in [-L, L], K = 100 tones.
  static PulseProcess chain_defaults(int length, std::uint64_t seed);

  static PulseProcess white_noise(double sigma, std::uint64_t seed);

  /// Closed-form autocovariance of the tonal law with phases uniform over a
  /// full period: c(s) = K E[A^2]/2 * mean_w cos(w s). Empty when the phase
  /// range is not a full period.
  std::optional<double> correlation(double s) const;

  /// 2 int_0^inf c(s) ds of the closed form, when available.
  std::optional<double> sigma_eff_closed_form() const;
};

/// One realization of the control signal.
struct Pulse {
  std::vector<double> amplitude, frequency, phase;
  double white_value = 0.0;  // per-step value for the white-noise law
  bool white = false;

  double operator()(double t) const;
};

Pulse sample_pulse(const PulseProcess& process, Rng& rng);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> g_values;
  CMatrix U;
  double unitarity_drift = 0.0;
};

/// Time-ordered propagation with exponential-midpoint steps
/// U <- exp(-i dt (H + g(t + dt/2) V)) U; each step is exactly unitary.
Trajectory propagate(const SystemSpec& sys, const std::function<double(double)>& g, double T,
                     double dt);

/// Propagation of one sampled pulse realization; white-noise pulses redraw
/// their value each step from `rng`.
Trajectory propagate_pulse(const SystemSpec& sys, const Pulse& pulse, double T, double dt,
                           Rng& rng);

/// Empirical mean of U^{x q} x (U^{x q})^* over sampled trajectories, with a
/// delete-block estimate of the channel's statistical error.
struct Ensemble {
  Index n_samples = 0;
  int q = 1;
  CMatrix channel_estimate;
  double standard_error = 0.0;        // jackknife error of the leading singular value
  double frobenius_error = 0.0;       // aggregate per-entry standard error, Frobenius norm
  std::vector<CMatrix> block_means;   // retained when the dimension is small
};

Ensemble ensemble_average(const SystemSpec& sys, const PulseProcess& process, int q, double T,
                          double dt, Index n_samples, int threads = 0,
                          const NumericPolicy& policy = NumericPolicy::defaults());

struct MarkovReport {
  std::vector<double> times;
  std::vector<double> discrepancy;     // ||empirical - exp(T L)||_{2->2}
  std::vector<double> standard_error;  // Frobenius-aggregate error of the estimate
  double sigma_eff = 0.0;
};

/// Compares the empirical channel against the semigroup with the effective
/// noise strength extracted from the pulse autocovariance.
MarkovReport markov_check(const SystemSpec& sys, const PulseProcess& process, int q,
                          const std::vector<double>& t_grid, Index n_samples, double dt,
                          int threads = 0, const NumericPolicy& policy = NumericPolicy::defaults());

/// sigma_eff = 2 int_0^s0 c(s) ds with the empirical autocovariance
/// integrated up to its first zero crossing.
double estimate_sigma_eff(const PulseProcess& process, Index n_draws, double s_max, double ds);

/// Haar-distributed unitary via Gaussian QR with phase correction.
CMatrix haar_sample(Index d, Rng& rng);

/// Bijects a unitary onto d^2 coordinates in [0, 2pi) whose joint law under
/// the Haar measure is the uniform product measure: column phases plus
/// stick-breaking images of the column moduli, peeled off one Householder
/// reflection at a time.
RVector angle_decompose(const CMatrix& u);

/// Inverse of angle_decompose.
CMatrix angle_reconstruct(const RVector& angles, Index d);

struct UniformityHistogram {
  Eigen::MatrixXi counts;  // one row per angle coordinate
  double chi2 = 0.0;
  Index dof = 0;
};

UniformityHistogram uniformity_histogram(const std::vector<RVector>& samples, int bins = 25);

/// Upper quantile of the chi-square distribution (Wilson-Hilferty).
double chi2_quantile(double probability, Index dof);

struct ExpanderEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// ||channel_estimate - U_inf||_inf with a sampling-error bar.
ExpanderEstimate expander_distance_mc(const Ensemble& ensemble, const HaarProjector& projector);

/// Channel blob I/O: dimension header then row-major (re, im) little-endian
/// doubles.
void save_channel(const std::string& path, const CMatrix& channel);
CMatrix load_channel(const std::string& path);

}  // namespace haarmix
