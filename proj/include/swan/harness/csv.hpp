// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "swan/harness/config.hpp"
#include "swan/harness/experiment.hpp"

namespace swan::harness::csv {

/// %.17g: enough digits for an exact double round trip.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline constexpr std::string_view kRowHeader =
    "experiment,scheme,kappa,sweep_value,drop,final_mse,iterations,evaluations,seed,elapsed";
inline constexpr std::string_view kAggregateHeader = "scheme,kappa,sweep_value,mean_mse,std_error,count";
inline constexpr std::string_view kTraceHeader = "scheme,kappa,sweep_value,drop,iteration,mse";
inline constexpr std::string_view kOracleHeader = "scheme,kappa,sweep_value,drop,optimizer_mse,oracle_mse,rel_gap";
inline constexpr std::string_view kRestartHeader = "scheme,kappa,sweep_value,drop,restart,seed,design_mse";

inline std::string line(const ResultRow& r) {
  return field(r.experiment) + ',' + field(r.scheme) + ',' + fmt(r.kappa) + ',' + fmt(r.sweep_value) + ',' +
         std::to_string(r.drop) + ',' + fmt(r.final_mse) + ',' + std::to_string(r.iterations) + ',' +
         std::to_string(r.evaluations) + ',' + std::to_string(r.seed) + ',' + fmt(r.elapsed);
}

inline std::string line(const AggregateRow& a) {
  return field(a.scheme) + ',' + fmt(a.kappa) + ',' + fmt(a.sweep_value) + ',' + fmt(a.mean_mse) + ',' +
         fmt(a.std_error) + ',' + std::to_string(a.count);
}

inline std::string line(const TraceRow& t) {
  return field(t.scheme) + ',' + fmt(t.kappa) + ',' + fmt(t.sweep_value) + ',' + std::to_string(t.drop) + ',' +
         std::to_string(t.iteration) + ',' + fmt(t.mse);
}

inline std::string line(const OracleRow& o) {
  return field(o.scheme) + ',' + fmt(o.kappa) + ',' + fmt(o.sweep_value) + ',' + std::to_string(o.drop) + ',' +
         fmt(o.optimizer_mse) + ',' + fmt(o.oracle_mse) + ',' + fmt(o.rel_gap);
}

inline std::string line(const RestartRow& r) {
  return field(r.scheme) + ',' + fmt(r.kappa) + ',' + fmt(r.sweep_value) + ',' + std::to_string(r.drop) + ',' +
         std::to_string(r.restart) + ',' + std::to_string(r.seed) + ',' + fmt(r.design_mse);
}

template <class Row>
std::string render(std::string_view header, const std::vector<Row>& rows) {
  std::string out(header);
  out += '\n';
  for (const auto& r : rows) {
    out += line(r);
    out += '\n';
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  write_file(path, render(kRowHeader, rows));
}
inline void emit_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
  write_file(path, render(kAggregateHeader, rows));
}
inline void emit_csv(const std::vector<TraceRow>& rows, const std::filesystem::path& path) {
  write_file(path, render(kTraceHeader, rows));
}
inline void emit_csv(const std::vector<OracleRow>& rows, const std::filesystem::path& path) {
  write_file(path, render(kOracleHeader, rows));
}
inline void emit_csv(const std::vector<RestartRow>& rows, const std::filesystem::path& path) {
  write_file(path, render(kRestartHeader, rows));
}

/// Splits one CSV record, honouring RFC 4180 quoting.
inline std::vector<std::string> split_record(std::string_view rec) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const char c = rec[i];
    if (quoted) {
      if (c == '"' && i + 1 < rec.size() && rec[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

/// Reads a file written by emit_csv(std::vector<ResultRow>).
inline std::vector<ResultRow> read_rows(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  std::string header;
  std::getline(f, header);
  if (header != kRowHeader) throw IoError("'" + path.string() + "': unexpected header");
  std::vector<ResultRow> rows;
  std::string rec;
  while (std::getline(f, rec)) {
    if (rec.empty()) continue;
    const auto c = split_record(rec);
    if (c.size() != 10) throw IoError("'" + path.string() + "': malformed record");
    ResultRow r;
    r.experiment = c[0];
    r.scheme = c[1];
    r.kappa = std::stod(c[2]);
    r.sweep_value = std::stod(c[3]);
    r.drop = std::stoull(c[4]);
    r.final_mse = std::stod(c[5]);
    r.iterations = std::stoull(c[6]);
    r.evaluations = std::stoull(c[7]);
    r.seed = std::stoull(c[8]);
    r.elapsed = std::stod(c[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace swan::harness::csv
