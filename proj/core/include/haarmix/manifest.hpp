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
#include <string>
#include <vector>

#include <json.hpp>

namespace haarmix {

/// SHA-256 hex digest.
std::string sha256_hex(const std::string& data);

/// Canonical serialization (sorted keys, no whitespace) used for config
/// hashing; stable under field reordering in the source file.
std::string canonical_json(const nlohmann::json& j);

/// Run provenance: config hash, code version, timestamps, per-task seeds and
/// the produced file inventory with content hashes.
struct RunManifest {
  std::string config_hash;
  std::string code_version;
  std::string started_at;
  std::string finished_at;
  std::uint64_t master_seed = 0;
  bool deterministic = false;
  std::vector<std::pair<std::string, std::uint64_t>> task_seeds;
  std::vector<std::pair<std::string, std::string>> outputs;  // (path, sha256)

  nlohmann::json to_json() const;
  void write(const std::string& path) const;
};

std::string iso8601_now();

}  // namespace haarmix
