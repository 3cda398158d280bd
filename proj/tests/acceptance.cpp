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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "swan/harness/output.hpp"
#include "swan/oracles.hpp"
#include "swan/swan.hpp"

using namespace swan;
using namespace swan::harness;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string format(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Scene random_scene(CounterRng& rng, std::size_t m, std::size_t k, bool near_span) {
  Scene s;
  s.region = ServiceRegion(100.0, 20.0);
  s.layout = build_layout(m, 1.0, s.region, 3.0);
  s.drop = sample_users(s.region, k, rng());
  if (near_span) {
    const double lo = s.layout.feed_x.front() - 3.0;
    const double hi = s.layout.segment_end(m - 1) + 3.0;
    for (auto& u : s.drop.users) {
      u.x = rng.uniform(lo, hi);
      u.y = rng.uniform(-3.0, 3.0);
    }
  }
  return s;
}

std::size_t pick(CounterRng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1)) % (hi - lo + 1);
}

ChannelVector random_channel(CounterRng& rng, std::size_t k) {
  const double scale = std::pow(10.0, rng.uniform(-6.0, -4.0));
  ChannelVector h(k);
  for (auto& v : h) v = scale * Complex{rng.normal(), rng.normal()} / std::sqrt(2.0);
  return h;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const AggregateRow& find(const std::vector<AggregateRow>& agg, const std::string& scheme, double kappa, double sweep) {
  for (const auto& a : agg)
    if (a.scheme == scheme && a.kappa == kappa && a.sweep_value == sweep) return a;
  throw std::runtime_error("missing aggregate " + scheme);
}

ExperimentSpec spec_for(ExperimentKind kind) {
  ExperimentSpec s = defaults_for(kind);
  s.q_grid = 200;
  s.n_drops = 100;
  s.master_seed = 2025;
  return s;
}

// 1 -------------------------------------------------------------------------
Outcome scaling_optimality() {
  const RadioConfig cfg;
  const double p = cfg.p_tx, s2 = cfg.noise_var;
  CounterRng rng(101);
  std::size_t violations = 0;
  double worst_grad = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    const auto h = random_channel(rng, pick(rng, 1, 16));
    const MseReport best = mse_min(h, p, s2);
    const double slack = 1e-12 * std::max(1.0, best.mse);
    const double r_abs = std::abs(best.r_opt);
    for (int t = 0; t < 100000; ++t) {
      // Offsets from 1e-6 to 10 times |r*|, log-uniform in size.
      const double radius = r_abs * std::exp(rng.uniform(-6.0, 1.0) * std::numbers::ln10);
      const Complex r = best.r_opt + radius * Complex{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      if (best.mse > mse_given_scaling(h, r, p, s2) + slack) ++violations;
    }
    // Central differences along Re and Im of a relative perturbation of r*.
    const double eps = 1e-5;
    const Complex u = best.r_opt;
    const double gx = (mse_given_scaling(h, u * Complex{1 + eps, 0}, p, s2) -
                       mse_given_scaling(h, u * Complex{1 - eps, 0}, p, s2)) / (2 * eps);
    const double gy = (mse_given_scaling(h, u * Complex{1, eps}, p, s2) -
                       mse_given_scaling(h, u * Complex{1, -eps}, p, s2)) / (2 * eps);
    worst_grad = std::max(worst_grad, std::hypot(gx, gy));
  }
  return {violations == 0 && worst_grad < 1e-6,
          format("1e8 scans, %zu below the minimum; max |grad| %.2e (< 1e-6)", violations, worst_grad)};
}

// 2 -------------------------------------------------------------------------
Outcome empirical_agreement() {
  const RadioConfig cfg;
  CounterRng rng(202);
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const auto h = random_channel(rng, pick(rng, 1, 16));
    Complex r = optimal_scaling(h, cfg.p_tx, cfg.noise_var);
    if (inst % 2) r *= Complex{rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)};
    const double analytic = mse_given_scaling(h, r, cfg.p_tx, cfg.noise_var);
    const auto emp = empirical_mse_stats(h, cfg.p_tx, cfg.noise_var, r, 100000, rng());
    worst = std::max(worst, std::fabs(emp.mean - analytic) / emp.std_error);
  }
  return {worst < 5.0, format("50 instances x 1e5 trials, worst deviation %.2f SE (< 5)", worst)};
}

// 3 -------------------------------------------------------------------------
Outcome phase_update_vs_grid() {
  const RadioConfig cfg;
  CounterRng rng(303);
  constexpr std::size_t kGrid = 1000000;
  std::vector<double> cs(kGrid), sn(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) {
    const double t = kTwoPi * static_cast<double>(i) / kGrid;
    cs[i] = std::cos(t);
    sn[i] = std::sin(t);
  }
  double worst_shortfall = -1e300, worst_resid = 0.0, worst_direct = 0.0;
  std::size_t degenerate = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t m = pick(rng, 1, 8);
    const Scene scene = random_scene(rng, m, pick(rng, 1, 10), inst % 2 == 0);
    const Placement pl = random_placement(cfg, scene, Architecture::SA2, rng);
    const std::size_t seg = pick(rng, 0, m - 1);
    const PhaseUpdate pu = phase_update_closed(cfg, scene, pl, seg);
    const auto& im = pu.intermediates;

    // Objective rebuilt from the per-user terms, independent of the update's bookkeeping.
    Complex sa{}, sb{}, sab{};
    double energy = 0.0;
    for (std::size_t k = 0; k < im.a.size(); ++k) {
      sa += im.a[k];
      sb += im.b[k];
      sab += im.a[k] * std::conj(im.b[k]);
      energy += std::norm(im.a[k]) + std::norm(im.b[k]);
    }
    const double num0 = std::norm(sa) + std::norm(sb), den0 = energy + cfg.noise_var / cfg.p_tx;
    const Complex nu = 2.0 * sa * std::conj(sb), de = 2.0 * sab;
    auto phi = [&](double c, double s) {
      return (num0 + nu.real() * c - nu.imag() * s) / (den0 + de.real() * c - de.imag() * s);
    };
    double grid_max = -1e300;
    for (std::size_t i = 0; i < kGrid; ++i) grid_max = std::max(grid_max, phi(cs[i], sn[i]));
    const double at_star = phi(std::cos(pu.theta), std::sin(pu.theta));
    worst_shortfall = std::max(worst_shortfall, grid_max - at_star);

    const double direct = phase_objective(cfg, scene, pl, seg, pu.theta);
    worst_direct = std::max(worst_direct, std::fabs(direct - at_star) / std::max(1e-300, std::fabs(at_star)));
    if (pu.degenerate) {
      ++degenerate;
      continue;
    }
    const double resid = im.xi - (im.coef_a * std::sin(pu.theta) + im.coef_b * std::cos(pu.theta));
    worst_resid = std::max(worst_resid, std::fabs(resid) / im.r_norm);
  }
  const bool ok = worst_shortfall <= 1e-9 && worst_resid < 1e-8 && worst_direct < 1e-10;
  return {ok, format("grid max - phi(theta*) <= %.2e (<= 1e-9); residual/R %.2e (< 1e-8); "
                     "%zu flat instances; direct vs rational %.1e",
                     worst_shortfall, worst_resid, degenerate, worst_direct)};
}

// 4 -------------------------------------------------------------------------
Outcome monotone_convergence() {
  const RadioConfig cfg;
  CounterRng rng(404);
  double worst_rise = 0.0;
  std::size_t unconverged = 0, max_sweeps = 0, mismatched = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const Scene scene = random_scene(rng, pick(rng, 1, 8), pick(rng, 1, 10), inst % 2 == 0);
    for (Architecture arch : {Architecture::SA1, Architecture::SA2}) {
      const Placement init = inst % 4 < 2 ? midpoint_placement(scene, arch) : random_placement(cfg, scene, arch, rng);
      AoOptions opt;
      opt.q_grid = 200;
      const auto per_sweep = arch == Architecture::SA1 ? sa1_ao(cfg, scene, init, opt) : sa2_ao(cfg, scene, init, opt);
      opt.trace_each_update = true;
      const auto per_update = arch == Architecture::SA1 ? sa1_ao(cfg, scene, init, opt) : sa2_ao(cfg, scene, init, opt);
      for (const auto* rec : {&per_sweep, &per_update})
        for (std::size_t i = 1; i < rec->mse_trace.size(); ++i)
          worst_rise = std::max(worst_rise, rec->mse_trace[i] - rec->mse_trace[i - 1]);
      const auto& t = per_sweep.mse_trace;
      if (t.size() < 2 || t[t.size() - 2] - t.back() >= opt.tol) ++unconverged;
      if (per_sweep.final_mse != per_update.final_mse) ++mismatched;
      max_sweeps = std::max(max_sweeps, per_sweep.iterations);
    }
  }
  const bool ok = worst_rise <= 1e-12 && unconverged == 0 && mismatched == 0;
  return {ok, format("200 runs, max trace rise %.2e (<= 1e-12); %zu unconverged; max %zu sweeps (<= 100)",
                     worst_rise, unconverged, max_sweeps)};
}

// 5 -------------------------------------------------------------------------
Outcome ss_matches_pass() {
  const RadioConfig cfg;
  double worst = 0.0;
  for (std::size_t d = 0; d < 50; ++d) {
    ExperimentSpec s = spec_for(ExperimentKind::SweepMFixedL);
    const Scene scene = build_scene(s, 5.0, drop_seed(s.master_seed, d));
    // An independently built single waveguide over the same aperture.
    Scene span = scene;
    span.layout = build_layout(1, 5.0 * scene.layout.seg_length, scene.region, scene.layout.height);
    const double a = ss_exhaustive(cfg, span, s.q_grid).final_mse;
    const double b = pass_baseline(cfg, scene, s.q_grid).final_mse;
    worst = std::max(worst, std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b)));
  }
  // The harness view: SS on a single segment against PASS.
  ExperimentSpec s = spec_for(ExperimentKind::SweepMFixedL);
  s.sweep_values = {1};
  s.n_drops = 50;
  s.kappas = {0.0};
  s.schemes = {Scheme::SS, Scheme::PASS};
  const auto res = run_experiment(s);
  double worst_harness = 0.0;
  for (std::size_t i = 0; i + 1 < res.rows.size(); i += 2)
    worst_harness = std::max(worst_harness, std::fabs(res.rows[i].final_mse - res.rows[i + 1].final_mse) /
                                                res.rows[i].final_mse);
  return {worst <= 1e-12 && worst_harness <= 1e-12,
          format("50 drops, max relative difference %.1e; harness M=1 SS vs PASS %.1e (<= 1e-12)", worst,
                 worst_harness)};
}

// 6 -------------------------------------------------------------------------
Outcome scheme_ordering() {
  ExperimentSpec s = spec_for(ExperimentKind::SweepMFixedL);
  s.sweep_values = {5};
  s.seg_length = 1.0;
  s.k_users = 10;
  s.schemes = {Scheme::SS, Scheme::SA1, Scheme::SA2};
  const auto agg = aggregate(run_experiment(s).rows);
  bool ok = true;
  std::string detail;
  for (double kappa : s.kappas) {
    const auto& ss = find(agg, "SS", kappa, 5);
    const auto& sa1 = find(agg, "SA1", kappa, 5);
    const auto& sa2 = find(agg, "SA2", kappa, 5);
    const double se21 = std::hypot(sa2.std_error, sa1.std_error);
    const double se1s = std::hypot(sa1.std_error, ss.std_error);
    ok = ok && sa1.mean_mse - sa2.mean_mse > se21 && ss.mean_mse - sa1.mean_mse > se1s;
    detail += format("%skappa=%g: SA2 %.4f < SA1 %.4f < SS %.4f (gaps %.3f > %.3f, %.3f > %.3f)",
                     detail.empty() ? "" : "; ", kappa, sa2.mean_mse, sa1.mean_mse, ss.mean_mse,
                     sa1.mean_mse - sa2.mean_mse, se21, ss.mean_mse - sa1.mean_mse, se1s);
  }
  return {ok, detail};
}

// 7 -------------------------------------------------------------------------
Outcome lossy_gap_shrinks() {
  ExperimentSpec s = spec_for(ExperimentKind::SweepMFixedSpan);
  s.sweep_values = {1, 2, 5, 10};
  s.d_x = 50.0;
  s.kappas = {0.0, 0.08};
  s.schemes = {Scheme::SS, Scheme::SA2};
  bool ok = true;
  std::string detail;
  for (bool mismatched : {false, true}) {
    if (mismatched) s.design_kappa = 0.0;
    const auto agg = aggregate(run_experiment(s).rows);
    for (const char* scheme : {"SS", "SA2"}) {
      auto gap = [&](double m) { return find(agg, scheme, 0.08, m).mean_mse - find(agg, scheme, 0.0, m).mean_mse; };
      const double g1 = gap(1), g10 = gap(10);
      ok = ok && g10 < g1;
      detail += format("%s%s%s gap M=1 %.2e, M=10 %.2e", detail.empty() ? "" : "; ", scheme,
                       mismatched ? " (lossless design)" : "", g1, g10);
    }
  }
  return {ok, detail};
}

// 8 -------------------------------------------------------------------------
Outcome mse_increasing_in_k() {
  ExperimentSpec s = spec_for(ExperimentKind::SweepK);
  s.sweep_values = {2, 6, 10, 14, 18};
  s.d_x = 50.0;
  const auto agg = aggregate(run_experiment(s).rows);
  bool ok = true;
  std::string detail;
  for (Scheme sc : s.schemes) {
    for (double kappa : s.kappas) {
      std::string curve;
      for (std::size_t i = 0; i < s.sweep_values.size(); ++i) {
        const double v = find(agg, std::string(to_string(sc)), kappa, s.sweep_values[i]).mean_mse;
        if (i > 0 && !(v > find(agg, std::string(to_string(sc)), kappa, s.sweep_values[i - 1]).mean_mse)) ok = false;
        curve += format("%s%.2f", curve.empty() ? "" : " ", v);
      }
      if (kappa == 0.0) detail += format("%s%s [%s]", detail.empty() ? "" : "; ", std::string(to_string(sc)).c_str(),
                                         curve.c_str());
    }
  }
  return {ok, detail + " (kappa=0 shown; kappa=0.08 also checked)"};
}

// 9 -------------------------------------------------------------------------
Outcome evaluation_counts() {
  const RadioConfig cfg;
  CounterRng rng(909);
  std::size_t bad = 0, cases = 0;
  for (std::size_t m : {1, 2, 5, 10, 20}) {
    for (std::size_t q : {2, 10, 200, 1000}) {
      const Scene scene = random_scene(rng, m, 6, false);
      const auto two = ss_two_stage(cfg, scene, q);
      const auto full = ss_exhaustive(cfg, scene, q);
      if (two.evaluations != m + q || full.evaluations != m * q) ++bad;
      ++cases;
    }
  }
  return {bad == 0, format("%zu (M, Q) pairs, %zu counter mismatches", cases, bad)};
}

// 10 ------------------------------------------------------------------------
Outcome oracle_gaps() {
  ExperimentSpec s = defaults_for(ExperimentKind::OracleCheck);
  s.n_drops = 20;
  s.master_seed = 2025;
  s.schemes = {Scheme::SA1, Scheme::SA2};
  const auto res = run_experiment(s);
  double worst_below = 0.0;
  std::map<std::string, std::vector<double>> gaps;
  for (const auto& o : res.oracle) {
    worst_below = std::max(worst_below, o.oracle_mse - o.optimizer_mse);
    gaps[o.scheme].push_back(o.rel_gap);
  }
  auto mean = [](std::vector<double> v) {
    double t = 0.0;
    for (double x : v) t += x;
    return v.empty() ? 0.0 : t / static_cast<double>(v.size());
  };
  auto median = [](std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  return {worst_below <= 1e-12 && res.oracle.size() == 40,
          format("20 instances, max (oracle - AO) %.1e (<= 1e-12); relative gap mean/median SA1 %.1f%%/%.1f%%, "
                 "SA2 %.1f%%/%.1f%% (logged only)",
                 worst_below, 100 * mean(gaps["SA1"]), 100 * median(gaps["SA1"]), 100 * mean(gaps["SA2"]),
                 100 * median(gaps["SA2"]))};
}

// 11 ------------------------------------------------------------------------
Outcome reproducible_outputs() {
  const fs::path root = fs::temp_directory_path() / "swan_acceptance_repro";
  fs::remove_all(root);
  std::size_t compared = 0, differing = 0;
  auto spec_a = spec_for(ExperimentKind::SweepMFixedL);
  spec_a.sweep_values = {1, 2, 3};
  spec_a.n_drops = 6;
  spec_a.q_grid = 60;
  spec_a.restarts = 2;
  auto spec_b = spec_for(ExperimentKind::Convergence);
  spec_b.n_drops = 4;
  spec_b.q_grid = 60;
  for (ExperimentSpec spec : {spec_a, spec_b}) {
    std::vector<std::vector<fs::path>> runs;
    for (int run = 0; run < 2; ++run) {
      spec.threads = run == 0 ? 1 : 4;
      runs.push_back(write_outputs(spec, run_experiment(spec), root / std::to_string(run)));
    }
    for (std::size_t i = 0; i < runs[0].size(); ++i) {
      const auto ext = runs[0][i].extension();
      if (ext != ".csv" && ext != ".svg") continue;
      ++compared;
      if (slurp(runs[0][i]) != slurp(runs[1][i])) ++differing;
    }
  }
  fs::remove_all(root);
  return {differing == 0 && compared > 0, format("%zu CSV/SVG files compared across runs, %zu differ", compared, differing)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "closed-form scaling optimality", 10, scaling_optimality},
      {2, "empirical MSE agreement", 30, empirical_agreement},
      {3, "closed-form phase update vs dense grid", 60, phase_update_vs_grid},
      {4, "monotone AO convergence", 120, monotone_convergence},
      {5, "SS equals PASS when lossless", 0, ss_matches_pass},
      {6, "scheme ordering SA2 < SA1 < SS", 300, scheme_ordering},
      {7, "lossy gap shrinks with segmentation", 300, lossy_gap_shrinks},
      {8, "MSE increasing in K", 0, mse_increasing_in_k},
      {9, "evaluation counters", 0, evaluation_counts},
      {10, "small-instance oracle gaps", 0, oracle_gaps},
      {11, "byte-identical reruns", 0, reproducible_outputs},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = seconds_since(t0);
    std::string timing = format("%.1f s", dt);
    if (c.budget_s > 0) {
      timing += format(" / %.0f s", c.budget_s);
      if (dt >= c.budget_s) o.pass = false;
    }
    if (!o.pass) ++failures;
    std::printf("%s  %2d. %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
