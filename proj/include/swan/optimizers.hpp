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

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "swan/channel.hpp"
#include "swan/geometry.hpp"
#include "swan/metrics.hpp"
#include "swan/rng.hpp"

namespace swan {

struct RunRecord {
  Placement placement;
  std::vector<double> mse_trace;
  double final_mse = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::uint64_t seed = 0;
};

struct AoOptions {
  std::size_t q_grid = 1000;
  std::size_t max_iters = 100;
  double tol = 1e-8;               // absolute MSE decrease per full sweep
  bool trace_each_update = false;  // otherwise one trace entry per sweep
  bool update_phases = true;       // Type-II only
  // Type-II only. Once a cycle leaves every position unchanged, the next
  // cycle repeats its phase sweep, each followed by a guarded line search
  // along the pass direction, up to phase_passes times or until a pass gains
  // less than phase_tol. Plain cyclic phase updates crawl when M > K.
  std::size_t phase_passes = 100;
  double phase_tol = 1e-10;
};

inline double normalize_angle(double theta) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t = 0.0;
  return t;
}

// ---------------------------------------------------------------------------
// Initial placements

inline Placement midpoint_placement(const Scene& scene, Architecture arch) {
  Placement p;
  p.architecture = arch;
  for (std::size_t m = 0; m < scene.num_segments(); ++m) p.pa_x.push_back(scene.layout.midpoint(m));
  if (arch == Architecture::SA2) p.phases = std::vector<double>(scene.num_segments(), 0.0);
  return p;
}

/// Uniform positions within each segment (and uniform phases for SA2),
/// redrawn until the spacing clause holds. Falls back to midpoints after
/// `max_attempts` rejections.
inline Placement random_placement(const RadioConfig& cfg, const Scene& scene, Architecture arch, CounterRng& rng,
                                  int max_attempts = 1000) {
  Placement p = midpoint_placement(scene, arch);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Placement cand = p;
    for (std::size_t m = 0; m < scene.num_segments(); ++m)
      cand.pa_x[m] = rng.uniform(scene.layout.feed(m), scene.layout.segment_end(m));
    if (cand.phases)
      for (double& th : *cand.phases) th = normalize_angle(rng.uniform(0.0, 2.0 * std::numbers::pi));
    if (validate_placement(scene.layout, cand, cfg.spacing()).feasible()) return cand;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Segment selection

inline double ss_mse_objective(const RadioConfig& cfg, const Scene& scene, std::size_t segment, double pa_x) {
  const auto h = eff_channel_ss(cfg, scene, segment, pa_x);
  return mse_min_value(h, cfg.p_tx, cfg.noise_var);
}

namespace detail {

inline RunRecord ss_record(const RadioConfig& cfg, const Scene& scene, std::size_t segment, double pa_x) {
  RunRecord rec;
  rec.placement.architecture = Architecture::SS;
  rec.placement.pa_x = {pa_x};
  rec.placement.segment = segment;
  rec.final_mse = ss_mse_objective(cfg, scene, segment, pa_x);
  return rec;
}

}  // namespace detail

/// Midpoint screening over all segments, then a Q-point grid search on the
/// winner. Exactly M + Q objective evaluations.
inline RunRecord ss_two_stage(const RadioConfig& cfg, const Scene& scene, std::size_t q_grid) {
  if (q_grid < 2) throw std::invalid_argument("ss_two_stage: q_grid must be >= 2");
  std::size_t evals = 0;
  std::size_t best_seg = 0;
  double stage1 = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < scene.num_segments(); ++m) {
    const double v = ss_mse_objective(cfg, scene, m, scene.layout.midpoint(m));
    ++evals;
    if (v < stage1) {
      stage1 = v;
      best_seg = m;
    }
  }
  double best_x = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double x : grid_points(scene.layout, best_seg, q_grid)) {
    const double v = ss_mse_objective(cfg, scene, best_seg, x);
    ++evals;
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  RunRecord rec = detail::ss_record(cfg, scene, best_seg, best_x);
  rec.mse_trace = {stage1, best};
  rec.iterations = 2;
  rec.evaluations = evals;
  return rec;
}

/// Full M x Q search; the reference for ss_two_stage.
inline RunRecord ss_exhaustive(const RadioConfig& cfg, const Scene& scene, std::size_t q_grid) {
  if (q_grid < 2) throw std::invalid_argument("ss_exhaustive: q_grid must be >= 2");
  std::size_t evals = 0;
  std::size_t best_seg = 0;
  double best_x = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < scene.num_segments(); ++m) {
    for (double x : grid_points(scene.layout, m, q_grid)) {
      const double v = ss_mse_objective(cfg, scene, m, x);
      ++evals;
      if (v < best) {
        best = v;
        best_seg = m;
        best_x = x;
      }
    }
  }
  RunRecord rec = detail::ss_record(cfg, scene, best_seg, best_x);
  rec.mse_trace = {best};
  rec.iterations = 1;
  rec.evaluations = evals;
  return rec;
}

// ---------------------------------------------------------------------------
// Conventional PASS: one continuous waveguide over the whole SWAN aperture

/// The same drop seen by a single waveguide fed at the first SWAN feed point
/// and spanning all M segments.
inline Scene pass_scene(const Scene& scene) {
  Scene s = scene;
  s.layout.m_segments = 1;
  s.layout.seg_length = static_cast<double>(scene.num_segments()) * scene.layout.seg_length;
  s.layout.feed_x = {scene.layout.feed_x.front()};
  return s;
}

/// Single-PA grid search on pass_scene(scene). The returned placement is
/// expressed in pass_scene coordinates (segment 0).
inline RunRecord pass_baseline(const RadioConfig& cfg, const Scene& scene, std::size_t q_grid) {
  RunRecord rec = ss_exhaustive(cfg, pass_scene(scene), q_grid);
  rec.placement.architecture = Architecture::PassBaseline;
  return rec;
}

// ---------------------------------------------------------------------------
// Segment aggregation

namespace detail {

inline Complex segment_weight(const Scene& scene, const Placement& p, std::size_t m) {
  const double w = 1.0 / std::sqrt(static_cast<double>(scene.num_segments()));
  if (p.phases) return std::polar(w, (*p.phases)[m]);
  return {w, 0.0};
}

/// Contribution of every segment except `skip` under the placement's phases.
inline ChannelVector channel_without(const RadioConfig& cfg, const Scene& scene, const Placement& p,
                                     std::size_t skip) {
  ChannelVector rest(scene.num_users(), Complex{});
  for (std::size_t m = 0; m < scene.num_segments(); ++m)
    if (m != skip) accumulate_segment(cfg, scene, m, p.pa_x[m], segment_weight(scene, p, m), rest);
  return rest;
}

inline double placement_mse(const RadioConfig& cfg, const Scene& scene, const Placement& p) {
  const auto h = p.phases ? eff_channel_sa2(cfg, scene, p) : eff_channel_sa1(cfg, scene, p);
  return mse_min_value(h, cfg.p_tx, cfg.noise_var);
}

}  // namespace detail

struct PositionUpdate {
  double pa_x = 0.0;
  double mse = 0.0;
  std::size_t evaluations = 0;
  bool moved = false;
};

/// One-dimensional update of psi_m with all other PAs (and all phases) held
/// fixed. Candidates are the feasible grid of the segment plus the incumbent,
/// so the returned MSE never exceeds the current one. Phases, when present,
/// are honoured, which makes this the position step of Type-II AO as well.
inline PositionUpdate sa1_position_update(const RadioConfig& cfg, const Scene& scene, const Placement& placement,
                                          std::size_t segment, std::size_t q_grid) {
  if (segment >= scene.num_segments()) throw std::invalid_argument("sa1_position_update: segment out of range");
  const ChannelVector rest = detail::channel_without(cfg, scene, placement, segment);
  const Complex weight = detail::segment_weight(scene, placement, segment);
  ChannelVector h(rest.size());
  auto eval = [&](double x) {
    h = rest;
    accumulate_segment(cfg, scene, segment, x, weight, h);
    return mse_min_value(h, cfg.p_tx, cfg.noise_var);
  };

  PositionUpdate out;
  out.pa_x = placement.pa_x[segment];
  out.mse = eval(out.pa_x);
  out.evaluations = 1;
  const auto others = other_positions(placement.pa_x, segment);
  for (double x : feasible_grid(scene.layout, segment, q_grid, others, cfg.spacing())) {
    const double v = eval(x);
    ++out.evaluations;
    if (v < out.mse) {
      out.mse = v;
      out.pa_x = x;
      out.moved = true;
    }
  }
  return out;
}

/// Quantities of the closed-form Type-II phase step for one segment.
struct PhaseUpdateIntermediates {
  std::vector<Complex> a;  // this segment's per-user term, phase removed
  std::vector<Complex> b;  // all other segments, phases applied
  Complex cap_a{}, cap_b{}, cap_c{};
  double alpha = 0.0;
  double gamma = 0.0;
  double beta_mag = 0.0, p = 0.0;   // A B^* = |beta| e^{jp}
  double delta_mag = 0.0, q = 0.0;  // C = |delta| e^{jq}
  double coef_a = 0.0, coef_b = 0.0, xi = 0.0;
  double r_norm = 0.0;
  double phi = 0.0;
  double theta1 = 0.0, theta2 = 0.0;
};

/// (alpha + 2|beta|cos(theta + p)) / (gamma + 2|delta|cos(theta + q)).
inline double phase_objective(const PhaseUpdateIntermediates& im, double theta) noexcept {
  return (im.alpha + 2.0 * im.beta_mag * std::cos(theta + im.p)) /
         (im.gamma + 2.0 * im.delta_mag * std::cos(theta + im.q));
}

inline PhaseUpdateIntermediates phase_intermediates(const RadioConfig& cfg, const Scene& scene,
                                                    const Placement& placement, std::size_t segment) {
  if (!placement.phases) throw std::invalid_argument("phase update: placement carries no phases");
  if (segment >= scene.num_segments()) throw std::invalid_argument("phase update: segment out of range");
  PhaseUpdateIntermediates im;
  const double w = 1.0 / std::sqrt(static_cast<double>(scene.num_segments()));
  im.a.assign(scene.num_users(), Complex{});
  accumulate_segment(cfg, scene, segment, placement.pa_x[segment], Complex{w, 0.0}, im.a);
  im.b = detail::channel_without(cfg, scene, placement, segment);

  double energy = 0.0;
  for (std::size_t k = 0; k < im.a.size(); ++k) {
    im.cap_a += im.a[k];
    im.cap_b += im.b[k];
    im.cap_c += im.a[k] * std::conj(im.b[k]);
    energy += std::norm(im.a[k]) + std::norm(im.b[k]);
  }
  im.alpha = std::norm(im.cap_a) + std::norm(im.cap_b);
  im.gamma = energy + cfg.noise_var / cfg.p_tx;
  const Complex ab = im.cap_a * std::conj(im.cap_b);
  im.beta_mag = std::abs(ab);
  im.p = std::arg(ab);
  im.delta_mag = std::abs(im.cap_c);
  im.q = std::arg(im.cap_c);

  // Stationarity of the rational form: coef_a sin(theta) + coef_b cos(theta) = xi.
  im.coef_a = 2.0 * im.gamma * im.beta_mag * std::cos(im.p) - 2.0 * im.alpha * im.delta_mag * std::cos(im.q);
  im.coef_b = 2.0 * im.gamma * im.beta_mag * std::sin(im.p) - 2.0 * im.alpha * im.delta_mag * std::sin(im.q);
  im.xi = 4.0 * im.beta_mag * im.delta_mag * std::sin(im.q - im.p);
  im.r_norm = std::hypot(im.coef_a, im.coef_b);
  im.phi = std::atan2(im.coef_a, im.coef_b);
  const double ratio = im.r_norm > 0.0 ? std::clamp(im.xi / im.r_norm, -1.0, 1.0) : 1.0;
  const double spread = std::acos(ratio);
  im.theta1 = normalize_angle(im.phi + spread);
  im.theta2 = normalize_angle(im.phi - spread);
  return im;
}

/// phi(theta) evaluated from a_k and b_k directly.
inline double phase_objective(const RadioConfig& cfg, const Scene& scene, const Placement& placement,
                              std::size_t segment, double theta) {
  Placement p = placement;
  if (!p.phases) throw std::invalid_argument("phase_objective: placement carries no phases");
  const double w = 1.0 / std::sqrt(static_cast<double>(scene.num_segments()));
  ChannelVector h = detail::channel_without(cfg, scene, p, segment);
  accumulate_segment(cfg, scene, segment, p.pa_x[segment], std::polar(w, theta), h);
  Complex sum{};
  double energy = 0.0;
  for (const Complex& v : h) {
    sum += v;
    energy += std::norm(v);
  }
  return std::norm(sum) / (energy + cfg.noise_var / cfg.p_tx);
}

struct PhaseUpdate {
  double theta = 0.0;
  bool degenerate = false;
  PhaseUpdateIntermediates intermediates;
};

inline constexpr double kPhaseDegenerateRel = 1e-15;

/// Closed-form maximiser of phi(theta_m). When the coefficient vector
/// vanishes the objective is flat and the current phase is kept.
inline PhaseUpdate phase_update_closed(const RadioConfig& cfg, const Scene& scene, const Placement& placement,
                                       std::size_t segment) {
  PhaseUpdate out;
  out.intermediates = phase_intermediates(cfg, scene, placement, segment);
  const auto& im = out.intermediates;
  const double scale = im.gamma * im.beta_mag + im.alpha * im.delta_mag;
  if (scale == 0.0 || im.r_norm < kPhaseDegenerateRel * scale) {
    out.theta = (*placement.phases)[segment];
    out.degenerate = true;
    return out;
  }
  const double v1 = phase_objective(im, im.theta1);
  const double v2 = phase_objective(im, im.theta2);
  if (v1 > v2)
    out.theta = im.theta1;
  else if (v2 > v1)
    out.theta = im.theta2;
  else
    out.theta = std::min(im.theta1, im.theta2);
  return out;
}

namespace detail {

/// Line search along the direction of the last phase pass, doubling the
/// step while the MSE keeps dropping. Keeps the incumbent unless a step
/// strictly improves it. Returns the objective evaluations spent.
inline std::size_t extend_phase_step(const RadioConfig& cfg, const Scene& scene, Placement& p,
                                     const std::vector<double>& before, double& mse) {
  constexpr int kMaxDoublings = 30;
  auto& phases = *p.phases;
  std::vector<double> dir(phases.size());
  bool moved = false;
  for (std::size_t m = 0; m < phases.size(); ++m) {
    dir[m] = std::remainder(phases[m] - before[m], 2.0 * std::numbers::pi);
    moved = moved || dir[m] != 0.0;
  }
  if (!moved) return 0;
  const std::vector<double> base = phases;
  std::vector<double> best_phases = base;
  std::size_t evals = 0;
  double step = 1.0;
  for (int i = 0; i < kMaxDoublings; ++i, step *= 2.0) {
    for (std::size_t m = 0; m < phases.size(); ++m) phases[m] = normalize_angle(base[m] + step * dir[m]);
    const double v = placement_mse(cfg, scene, p);
    ++evals;
    if (!(v < mse)) break;
    mse = v;
    best_phases = phases;
  }
  phases = best_phases;
  return evals;
}

inline RunRecord run_ao(const RadioConfig& cfg, const Scene& scene, const Placement& init, const AoOptions& opts,
                        bool type_two) {
  if (opts.q_grid < 2) throw std::invalid_argument("AO: q_grid must be >= 2");
  Placement p = init;
  p.architecture = type_two ? Architecture::SA2 : Architecture::SA1;
  p.segment.reset();
  if (type_two && !p.phases) p.phases = std::vector<double>(scene.num_segments(), 0.0);
  if (!type_two) p.phases.reset();
  const auto report = validate_placement(scene.layout, p, cfg.spacing());
  if (!report.feasible()) throw std::invalid_argument("AO: infeasible initial placement: " + report.violations.front().message);

  RunRecord rec;
  double current = placement_mse(cfg, scene, p);
  rec.evaluations = 1;
  rec.mse_trace.push_back(current);
  auto note = [&] {
    if (opts.trace_each_update) rec.mse_trace.push_back(placement_mse(cfg, scene, p));
  };

  bool positions_settled = false;
  for (std::size_t sweep = 1; sweep <= opts.max_iters; ++sweep) {
    if (type_two && opts.update_phases) {
      double phase_mse = current;
      const std::size_t passes = positions_settled ? std::max<std::size_t>(1, opts.phase_passes) : 1;
      for (std::size_t pass = 0; pass < passes; ++pass) {
        const std::vector<double> before = *p.phases;
        for (std::size_t m = 0; m < scene.num_segments(); ++m) {
          const PhaseUpdate pu = phase_update_closed(cfg, scene, p, m);
          rec.evaluations += 3;
          if (!pu.degenerate &&
              phase_objective(pu.intermediates, pu.theta) >= phase_objective(pu.intermediates, (*p.phases)[m]))
            (*p.phases)[m] = pu.theta;
          note();
        }
        if (passes == 1) break;
        double after = placement_mse(cfg, scene, p);
        ++rec.evaluations;
        rec.evaluations += extend_phase_step(cfg, scene, p, before, after);
        note();
        const bool settled = phase_mse - after < opts.phase_tol;
        phase_mse = after;
        if (settled) break;
      }
    }
    positions_settled = true;
    for (std::size_t m = 0; m < scene.num_segments(); ++m) {
      const PositionUpdate u = sa1_position_update(cfg, scene, p, m, opts.q_grid);
      rec.evaluations += u.evaluations;
      if (u.moved) positions_settled = false;
      p.pa_x[m] = u.pa_x;
      note();
    }
    const double next = placement_mse(cfg, scene, p);
    if (!opts.trace_each_update) rec.mse_trace.push_back(next);
    rec.iterations = sweep;
    const double decrease = current - next;
    current = next;
    if (decrease < opts.tol) break;
  }
  rec.final_mse = current;
  rec.placement = std::move(p);
  return rec;
}

}  // namespace detail

/// Element-wise alternating optimisation of the PA positions (Type-I).
inline RunRecord sa1_ao(const RadioConfig& cfg, const Scene& scene, const Placement& init, const AoOptions& opts = {}) {
  return detail::run_ao(cfg, scene, init, opts, false);
}

/// Type-II AO: a closed-form phase sweep followed by a position sweep,
/// repeated until the per-cycle MSE decrease drops below tol. See
/// AoOptions::phase_passes for the repeated phase sweep.
inline RunRecord sa2_ao(const RadioConfig& cfg, const Scene& scene, const Placement& init, const AoOptions& opts = {}) {
  return detail::run_ao(cfg, scene, init, opts, true);
}

}  // namespace swan
