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

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "swan/harness/config.hpp"
#include "swan/optimizers.hpp"
#include "swan/oracles.hpp"

namespace swan::harness {

struct ResultRow {
  std::string experiment;
  std::string scheme;
  double kappa = 0.0;
  double sweep_value = 0.0;
  std::size_t drop = 0;
  double final_mse = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::uint64_t seed = 0;
  double elapsed = 0.0;
};

/// One optimiser trace sample (convergence experiment).
struct TraceRow {
  std::string scheme;
  double kappa = 0.0;
  double sweep_value = 0.0;
  std::size_t drop = 0;
  std::size_t iteration = 0;
  double mse = 0.0;
};

/// Optimiser result against its brute-force reference (oracle-check).
struct OracleRow {
  std::string scheme;
  double kappa = 0.0;
  double sweep_value = 0.0;
  std::size_t drop = 0;
  double optimizer_mse = 0.0;
  double oracle_mse = 0.0;
  double rel_gap = 0.0;
};

/// One restart of an AO scheme; restart 0 is the midpoint start.
struct RestartRow {
  std::string scheme;
  double kappa = 0.0;
  double sweep_value = 0.0;
  std::size_t drop = 0;
  std::size_t restart = 0;
  std::uint64_t seed = 0;
  double design_mse = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<TraceRow> traces;
  std::vector<OracleRow> oracle;
  std::vector<RestartRow> restarts;
  std::vector<std::uint64_t> drop_seeds;
};

struct AggregateRow {
  std::string scheme;
  double kappa = 0.0;
  double sweep_value = 0.0;
  double mean_mse = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

inline std::uint64_t drop_seed(std::uint64_t master_seed, std::size_t drop) { return derive_seed(master_seed, drop); }

/// Scene of one work item: the swept value picks M (or K), users come from
/// the drop seed, so every scheme and sweep value of a drop sees the same
/// user draw.
inline Scene build_scene(const ExperimentSpec& spec, double sweep_value, std::uint64_t seed) {
  const auto v = static_cast<std::size_t>(sweep_value);
  std::size_t m = spec.m_segments;
  std::size_t k = spec.k_users;
  double seg_len = spec.seg_length;
  switch (spec.kind) {
    case ExperimentKind::SweepMFixedL:
    case ExperimentKind::Convergence:
    case ExperimentKind::OracleCheck:
      m = v;
      break;
    case ExperimentKind::SweepMFixedSpan:
      m = v;
      seg_len = spec.d_x / static_cast<double>(m);
      break;
    case ExperimentKind::SweepK:
      k = v;
      break;
  }
  Scene s;
  s.region = ServiceRegion(spec.d_x, spec.d_y);
  s.layout = build_layout(m, seg_len, s.region, spec.height);
  s.drop = sample_users(s.region, k, seed);
  return s;
}

namespace detail {

struct WorkOutput {
  std::vector<ResultRow> rows;
  std::vector<TraceRow> traces;
  std::vector<OracleRow> oracle;
  std::vector<RestartRow> restarts;
};

inline std::uint64_t restart_seed(std::uint64_t drop_seed, Scheme scheme, std::size_t restart) {
  return derive_seed(derive_seed(drop_seed, 0x5c0000 + static_cast<std::uint64_t>(scheme)), restart);
}

inline double evaluate(const RadioConfig& cfg, const Scene& scene, const RunRecord& rec) {
  if (rec.placement.architecture == Architecture::PassBaseline)
    return mse_min(effective_channel(cfg, pass_scene(scene), rec.placement), cfg.p_tx, cfg.noise_var).mse;
  return mse_min(effective_channel(cfg, scene, rec.placement), cfg.p_tx, cfg.noise_var).mse;
}

inline WorkOutput run_work_item(const ExperimentSpec& spec, double sweep_value, std::size_t drop) {
  WorkOutput out;
  const std::uint64_t seed = drop_seed(spec.master_seed, drop);
  const Scene scene = build_scene(spec, sweep_value, seed);
  const std::string exp_id(to_string(spec.kind));

  AoOptions ao;
  ao.q_grid = spec.q_grid;
  ao.max_iters = spec.max_iters;
  ao.tol = spec.tol;

  for (Scheme scheme : spec.schemes) {
    for (double kappa : spec.kappas) {
      const RadioConfig eval_cfg = spec.radio(kappa);
      const RadioConfig design_cfg = spec.design_kappa ? spec.radio(*spec.design_kappa) : eval_cfg;
      const auto t0 = std::chrono::steady_clock::now();

      RunRecord rec;
      std::uint64_t rec_seed = seed;
      switch (scheme) {
        case Scheme::SS: rec = ss_two_stage(design_cfg, scene, spec.q_grid); break;
        case Scheme::PASS: rec = pass_baseline(design_cfg, scene, spec.q_grid); break;
        case Scheme::SA1:
        case Scheme::SA2: {
          const Architecture arch = scheme == Scheme::SA1 ? Architecture::SA1 : Architecture::SA2;
          bool have = false;
          for (std::size_t r = 0; r < spec.restarts; ++r) {
            const std::uint64_t rs = r == 0 ? seed : restart_seed(seed, scheme, r);
            Placement init = midpoint_placement(scene, arch);
            if (r > 0) {
              CounterRng rng(rs);
              init = random_placement(design_cfg, scene, arch, rng);
            }
            RunRecord cand = arch == Architecture::SA1 ? sa1_ao(design_cfg, scene, init, ao)
                                                       : sa2_ao(design_cfg, scene, init, ao);
            cand.seed = rs;
            if (spec.restarts > 1)
              out.restarts.push_back({std::string(to_string(scheme)), kappa, sweep_value, drop, r, rs, cand.final_mse});
            if (!have || cand.final_mse < rec.final_mse) {
              rec = std::move(cand);
              have = true;
            }
          }
          rec_seed = rec.seed;
          break;
        }
      }
      const double final_mse = spec.design_kappa ? evaluate(eval_cfg, scene, rec) : rec.final_mse;
      const auto t1 = std::chrono::steady_clock::now();

      ResultRow row;
      row.experiment = exp_id;
      row.scheme = std::string(to_string(scheme));
      row.kappa = kappa;
      row.sweep_value = sweep_value;
      row.drop = drop;
      row.final_mse = final_mse;
      row.iterations = rec.iterations;
      row.evaluations = rec.evaluations;
      row.seed = rec_seed;
      row.elapsed = spec.timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
      out.rows.push_back(row);

      if (spec.kind == ExperimentKind::Convergence) {
        for (std::size_t i = 0; i < rec.mse_trace.size(); ++i)
          out.traces.push_back({row.scheme, kappa, sweep_value, drop, i, rec.mse_trace[i]});
      }
      if (spec.kind == ExperimentKind::OracleCheck) {
        double ref = 0.0;
        switch (scheme) {
          case Scheme::SS:
          case Scheme::PASS: ref = ss_exhaustive(design_cfg, scheme == Scheme::PASS ? pass_scene(scene) : scene, spec.q_grid).final_mse; break;
          case Scheme::SA1: {
            const auto init = midpoint_placement(scene, Architecture::SA1);
            ref = oracle::sa1_joint_exhaustive(design_cfg, scene, spec.q_grid, init.pa_x).mse;
            break;
          }
          case Scheme::SA2: {
            const auto init = midpoint_placement(scene, Architecture::SA2);
            ref = oracle::sa2_reduced_exhaustive(design_cfg, scene, spec.q_grid, 720, init.pa_x).mse;
            break;
          }
        }
        const double gap = ref > 0.0 ? (rec.final_mse - ref) / ref : 0.0;
        out.oracle.push_back({row.scheme, kappa, sweep_value, drop, rec.final_mse, ref, gap});
      }
    }
  }
  return out;
}

template <class T>
void append(std::vector<T>& dst, std::vector<T>& src) {
  dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

}  // namespace detail

/// Runs every (sweep value, drop) work item, in parallel when allowed.
/// Output order is (sweep value, drop, scheme, kappa) regardless of threading.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t n_sweep = spec.sweep_values.size();
  const std::size_t n_items = n_sweep * spec.n_drops;
  std::vector<detail::WorkOutput> outputs(n_items);

  std::size_t n_threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, n_items);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_items) return;
      try {
        outputs[i] = detail::run_work_item(spec, spec.sweep_values[i / spec.n_drops], i % spec.n_drops);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_items;
      }
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult res;
  for (auto& o : outputs) {
    detail::append(res.rows, o.rows);
    detail::append(res.traces, o.traces);
    detail::append(res.oracle, o.oracle);
    detail::append(res.restarts, o.restarts);
  }
  for (std::size_t d = 0; d < spec.n_drops; ++d) res.drop_seeds.push_back(drop_seed(spec.master_seed, d));
  return res;
}

namespace detail {

inline AggregateRow finish(const std::tuple<std::string, double, double>& key, const std::vector<double>& v) {
  AggregateRow a;
  a.scheme = std::get<0>(key);
  a.kappa = std::get<1>(key);
  a.sweep_value = std::get<2>(key);
  a.count = v.size();
  double sum = 0.0;
  for (double x : v) sum += x;
  a.mean_mse = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean_mse) * (x - a.mean_mse);
    a.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return a;
}

}  // namespace detail

/// Mean and standard error over drops for every (scheme, kappa, sweep value),
/// ordered by scheme name, then kappa, then sweep value.
inline std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("aggregate: no rows");
  std::map<std::tuple<std::string, double, double>, std::vector<double>> groups;
  for (const auto& r : rows) groups[{r.scheme, r.kappa, r.sweep_value}].push_back(r.final_mse);
  std::vector<AggregateRow> out;
  for (const auto& [key, vals] : groups) out.push_back(detail::finish(key, vals));
  return out;
}

/// Per-iteration mean of optimiser traces. Traces that stopped early are
/// padded with their final value; sweep_value of the output is the iteration.
/// With several swept values the series label carries the segment count.
inline std::vector<AggregateRow> aggregate_traces(const std::vector<TraceRow>& traces) {
  if (traces.empty()) throw std::invalid_argument("aggregate_traces: no traces");
  std::set<double> sweeps;
  for (const auto& t : traces) sweeps.insert(t.sweep_value);
  auto label = [&](const TraceRow& t) {
    if (sweeps.size() == 1) return t.scheme;
    char buf[64];
    std::snprintf(buf, sizeof buf, " M=%g", t.sweep_value);
    return t.scheme + buf;
  };
  using RunKey = std::tuple<std::string, double, double, std::size_t>;
  std::map<RunKey, std::vector<double>> runs;
  for (const auto& t : traces) {
    auto& v = runs[{label(t), t.kappa, t.sweep_value, t.drop}];
    if (v.size() <= t.iteration) v.resize(t.iteration + 1, 0.0);
    v[t.iteration] = t.mse;
  }
  std::map<std::tuple<std::string, double>, std::size_t> longest;
  for (const auto& [key, v] : runs) {
    auto& n = longest[{std::get<0>(key), std::get<1>(key)}];
    n = std::max(n, v.size());
  }
  std::map<std::tuple<std::string, double, double>, std::vector<double>> groups;
  for (const auto& [key, v] : runs) {
    const std::size_t n = longest[{std::get<0>(key), std::get<1>(key)}];
    for (std::size_t i = 0; i < n; ++i)
      groups[{std::get<0>(key), std::get<1>(key), static_cast<double>(i)}].push_back(i < v.size() ? v[i] : v.back());
  }
  std::vector<AggregateRow> out;
  for (const auto& [key, vals] : groups) out.push_back(detail::finish(key, vals));
  return out;
}

}  // namespace swan::harness
