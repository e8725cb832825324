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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "haarmix/types.hpp"

namespace haarmix {

/// CSV writer with a mandatory header row; numbers are serialized with 17
/// significant digits so deterministic runs reproduce files byte for byte.
class CsvWriter {
 public:
  using Cell = std::variant<std::string, double, long long>;

  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<Cell> cells) {
    if (cells.size() != header_.size()) {
      throw DimensionError("CsvWriter: row width does not match header");
    }
    rows_.push_back(std::move(cells));
  }

  std::string str() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
      out << (i ? "," : "") << header_[i];
    }
    out << "\n";
    char buf[64];
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ",";
        if (std::holds_alternative<double>(row[i])) {
          std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(row[i]));
          out << buf;
        } else if (std::holds_alternative<long long>(row[i])) {
          out << std::get<long long>(row[i]);
        } else {
          out << std::get<std::string>(row[i]);
        }
      }
      out << "\n";
    }
    return out.str();
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("CsvWriter: cannot open " + path);
    out << str();
  }

  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace haarmix
