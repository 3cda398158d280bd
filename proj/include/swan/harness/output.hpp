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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "swan/harness/config.hpp"
#include "swan/harness/csv.hpp"
#include "swan/harness/experiment.hpp"
#include "swan/harness/svg.hpp"

namespace swan::harness {

inline constexpr const char* kVersion = "1.0.0";

/// Everything needed to reproduce a run. Contains no clock or host data so
/// the file is byte-stable for a given spec.
inline nlohmann::json run_metadata(const ExperimentSpec& spec, const ExperimentResult& res) {
  nlohmann::json j;
  j["tool"] = "swan_cli";
  j["version"] = kVersion;
  j["experiment"] = std::string(to_string(spec.kind));
  j["parameters"] = to_json(spec);
  j["defaults_applied"] = std::vector<std::string>(spec.defaulted.begin(), spec.defaulted.end());
  j["k_users_is_default"] = spec.defaulted.count("k_users") > 0;
  j["seed_rule"] = "drop seed = derive_seed(master_seed, drop_index); restart r>0 seed = "
                   "derive_seed(derive_seed(drop_seed, 0x5c0000 + scheme_id), r)";
  j["drop_seeds"] = res.drop_seeds;
  j["rows"] = res.rows.size();
  j["elapsed_recorded"] = spec.timing;
  return j;
}

inline std::string x_label_for(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::SweepMFixedL:
    case ExperimentKind::SweepMFixedSpan:
    case ExperimentKind::OracleCheck: return "number of segments M";
    case ExperimentKind::SweepK: return "number of users K";
    case ExperimentKind::Convergence: return "iteration";
  }
  return "sweep value";
}

/// Writes rows, summary, linear and log plots and metadata into out_dir.
/// Returns the written paths.
inline std::vector<std::filesystem::path> write_outputs(const ExperimentSpec& spec, const ExperimentResult& res,
                                                        const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  const std::string id(to_string(spec.kind));
  std::vector<std::filesystem::path> written;
  auto path = [&](const std::string& suffix) {
    written.push_back(out_dir / (id + suffix));
    return written.back();
  };

  csv::emit_csv(res.rows, path(".csv"));
  const auto summary = aggregate(res.rows);
  csv::emit_csv(summary, path("_summary.csv"));

  std::vector<AggregateRow> plotted = summary;
  svg::PlotOptions opt;
  opt.title = id;
  opt.x_label = x_label_for(spec.kind);
  if (spec.kind == ExperimentKind::Convergence) {
    csv::emit_csv(res.traces, path("_traces.csv"));
    plotted = aggregate_traces(res.traces);
    csv::emit_csv(plotted, path("_trace_summary.csv"));
  }
  if (spec.kind == ExperimentKind::OracleCheck) csv::emit_csv(res.oracle, path("_gaps.csv"));
  if (!res.restarts.empty()) csv::emit_csv(res.restarts, path("_restarts.csv"));

  svg::emit_plot(plotted, path(".svg"), opt);
  opt.log_y = true;
  svg::emit_plot(plotted, path("_log.svg"), opt);

  csv::write_file(path("_metadata.json"), run_metadata(spec, res).dump(2) + "\n");
  return written;
}

}  // namespace swan::harness
