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


// Monte-Carlo driver for the segmented-waveguide AirComp experiments.
//
//   swan_cli <sweep-m|sweep-m-span|sweep-k|convergence|oracle-check> [flags]
//
// Exit codes: 0 success, 1 configuration error, 2 runtime or I/O error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swan/harness/config.hpp"
#include "swan/harness/experiment.hpp"
#include "swan/harness/output.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> drops;
  std::string out_dir = "out";
  std::vector<double> kappa;
  std::optional<double> design_kappa;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> q_grid;
  std::optional<std::size_t> k_users;
  std::optional<std::size_t> threads;
  bool timing = false;
  bool quiet = false;
};

void print_summary(const swan::harness::ExperimentSpec& spec, const swan::harness::ExperimentResult& res) {
  using namespace swan::harness;
  std::printf("%s: %zu rows (%zu drops, master seed %llu)\n", std::string(to_string(spec.kind)).c_str(),
              res.rows.size(), spec.n_drops, static_cast<unsigned long long>(spec.master_seed));
  const auto agg = spec.kind == ExperimentKind::Convergence ? aggregate_traces(res.traces) : aggregate(res.rows);
  std::printf("%-8s %8s %8s %14s %12s\n", "scheme", "kappa", spec.kind == ExperimentKind::Convergence ? "iter" : "value",
              "mean MSE", "std err");
  for (const auto& a : agg)
    std::printf("%-8s %8g %8g %14.6g %12.3g\n", a.scheme.c_str(), a.kappa, a.sweep_value, a.mean_mse, a.std_error);
  if (!res.oracle.empty()) {
    double worst = 0.0;
    for (const auto& o : res.oracle) worst = std::max(worst, o.rel_gap);
    std::printf("largest relative gap to brute force: %.3g\n", worst);
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace swan::harness;

  CLI::App app{"SWAN over-the-air computation experiments"};
  app.require_subcommand(1);
  Flags f;

  app.add_option("--config", f.config, "flat JSON experiment description");
  app.add_option("--seed", f.seed, "master seed");
  app.add_option("--drops", f.drops, "number of user drops");
  app.add_option("--out-dir", f.out_dir, "output directory")->capture_default_str();
  app.add_option("--kappa", f.kappa, "waveguide attenuation values in dB/m (comma separated)")->delimiter(',');
  app.add_option("--design-kappa", f.design_kappa, "optimise under this attenuation, evaluate under --kappa");
  app.add_option("--restarts", f.restarts, "AO restarts; restart 0 starts from segment midpoints");
  app.add_option("--q", f.q_grid, "grid points per segment");
  app.add_option("--k", f.k_users, "number of users when K is not swept");
  app.add_option("--threads", f.threads, "worker threads (0: all cores)");
  app.add_flag("--timing", f.timing, "record wall-clock time per row (outputs no longer byte-stable)");
  app.add_flag("--quiet", f.quiet, "suppress the summary table");

  const std::pair<const char*, const char*> commands[] = {
      {"sweep-m", "MSE versus segment count, fixed segment length"},
      {"sweep-m-span", "MSE versus segment count, fixed total length"},
      {"sweep-k", "MSE versus number of users"},
      {"convergence", "per-iteration AO traces"},
      {"oracle-check", "AO against exhaustive search on tiny instances"},
  };
  for (const auto& [name, about] : commands) app.add_subcommand(name, about)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  ExperimentSpec spec;
  try {
    const ExperimentKind kind = parse_kind(app.get_subcommands().front()->get_name());
    spec = f.config.empty() ? defaults_for(kind) : parse_config_file(f.config, kind);
    auto set = [&](const char* key, auto& field, const auto& value) {
      field = value;
      spec.defaulted.erase(key);
    };
    if (f.seed) set("master_seed", spec.master_seed, *f.seed);
    if (f.drops) set("n_drops", spec.n_drops, *f.drops);
    if (!f.kappa.empty()) set("kappas", spec.kappas, f.kappa);
    if (f.design_kappa) set("design_kappa", spec.design_kappa, f.design_kappa);
    if (f.restarts) set("restarts", spec.restarts, *f.restarts);
    if (f.q_grid) set("q_grid", spec.q_grid, *f.q_grid);
    if (f.k_users) set("k_users", spec.k_users, *f.k_users);
    if (f.threads) set("threads", spec.threads, *f.threads);
    if (f.timing) set("timing", spec.timing, true);
    spec.validate();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  }

  try {
    const auto res = run_experiment(spec);
    const auto files = write_outputs(spec, res, f.out_dir);
    if (!f.quiet) {
      print_summary(spec, res);
      for (const auto& p : files) std::printf("wrote %s\n", p.string().c_str());
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
