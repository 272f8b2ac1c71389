// Copyright 2026 the liouvsym authors
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
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "liouvsym/types.hpp"

namespace liouvsym {

/// 17 significant digits: lossless round trip of doubles.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_int(long long v) { return std::to_string(v); }

/// CSV writer with '#'-prefixed comment headers echoing the resolved
/// configuration, so every emitted number is traceable to its run.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::pair<std::string, std::string>>& config_header,
            const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw SolverError("CsvWriter: cannot open " + path.string());
    for (const auto& [k, v] : config_header) out_ << "# " << k << " = " << v << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  }

 private:
  std::ofstream out_;
};

}  // namespace liouvsym
