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

#include "haarmix/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>

#include "haarmix/types.hpp"

namespace haarmix {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256_hex: digest failure");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string canonical_json(const nlohmann::json& j) {
  // nlohmann::json keeps object keys sorted; a compact dump is canonical
  return j.dump();
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["code_version"] = code_version;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["master_seed"] = master_seed;
  j["deterministic"] = deterministic;
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& [task, seed] : task_seeds) {
    seeds.push_back({{"task", task}, {"seed", seed}});
  }
  j["task_seeds"] = seeds;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [path, hash] : outputs) {
    files.push_back({{"path", path}, {"sha256", hash}});
  }
  j["outputs"] = files;
  return j;
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("RunManifest: cannot open " + path);
  out << to_json().dump(2) << "\n";
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace haarmix
