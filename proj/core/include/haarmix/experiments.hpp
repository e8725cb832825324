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

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "haarmix/manifest.hpp"
#include "haarmix/model.hpp"
#include "haarmix/stochastic.hpp"
#include "haarmix/types.hpp"

namespace haarmix {

/// Parsed experiment description. Exactly one system source; all numeric
/// fields validated on parse with field-path errors.
struct ExperimentConfig {
  nlohmann::json raw;

  std::optional<ChainSpec> chain;
  std::optional<std::pair<CMatrix, CMatrix>> matrices;
  std::optional<double> counterexample_eps;

  double sigma = 1.0;
  std::vector<double> sigma_grid;   // empty means single sigma
  std::vector<int> lengths;         // scans over the chain family
  int q = 1;
  std::vector<int> q_grid;
  std::vector<double> time_grid;
  bool rescale_time_by_gap = false;

  PulseProcess pulse;
  bool has_pulse = false;
  Index samples = 0;
  double dt = 0.0;
  int bins = 25;

  std::uint64_t seed = 0;
  bool has_seed = false;
  bool deterministic = false;
  int threads = 0;
  NumericPolicy policy;

  std::string out_dir = ".";
  std::string prefix = "run";

  static ExperimentConfig parse(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);

  /// Builds the configured system at the given noise strength.
  SystemSpec system(double sigma_value) const;

  /// Chain lengths to scan; falls back to the configured chain length.
  std::vector<int> scan_lengths() const;
  std::vector<double> scan_sigmas() const;
  std::vector<int> scan_qs() const;

  std::string hash() const;
};

struct RunResult {
  std::vector<std::string> files;
  RunManifest manifest;
  bool ok = true;
};

RunResult run_gap(const ExperimentConfig& config);
RunResult run_bethe(const ExperimentConfig& config);
RunResult run_sample(const ExperimentConfig& config);
RunResult run_mixing(const ExperimentConfig& config);
RunResult run_control_time(const ExperimentConfig& config);

/// Invariant suite: unitality, trace preservation, biorthonormality,
/// permutation steady states, electrostatic gradients, permanent brute-force
/// equivalence. Prints one line per check; returns overall success.
bool run_check(std::ostream& out);

}  // namespace haarmix
