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

// Brute-force references for the optimisers. Everything here goes through
// the public channel and MSE evaluators and shares no code with the
// incremental AO or the closed-form phase step.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "swan/channel.hpp"
#include "swan/geometry.hpp"
#include "swan/metrics.hpp"

namespace swan::oracle {

struct JointResult {
  Placement placement;
  double mse = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
};

/// Candidate positions of one segment: the Q-point grid plus any extras
/// (typically the AO initial point, which may sit off-grid).
inline std::vector<double> candidates(const WaveguideLayout& layout, std::size_t m, std::size_t q_grid,
                                      const std::vector<double>& extra) {
  auto pts = grid_points(layout, m, q_grid);
  if (m < extra.size()) pts.push_back(extra[m]);
  return pts;
}

/// Joint search over every feasible combination of per-segment candidates
/// under the Type-I channel. Cost (Q + 1)^M.
inline JointResult sa1_joint_exhaustive(const RadioConfig& cfg, const Scene& scene, std::size_t q_grid,
                                        const std::vector<double>& extra = {}) {
  const std::size_t m_count = scene.num_segments();
  std::vector<std::vector<double>> cand(m_count);
  for (std::size_t m = 0; m < m_count; ++m) cand[m] = candidates(scene.layout, m, q_grid, extra);

  JointResult best;
  Placement p;
  p.architecture = Architecture::SA1;
  p.pa_x.assign(m_count, 0.0);
  auto recurse = [&](auto&& self, std::size_t m) -> void {
    if (m == m_count) {
      if (!validate_placement(scene.layout, p, cfg.spacing()).feasible()) return;
      const double v = mse_min(eff_channel_sa1(cfg, scene, p), cfg.p_tx, cfg.noise_var).mse;
      ++best.evaluations;
      if (v < best.mse) {
        best.mse = v;
        best.placement = p;
      }
      return;
    }
    for (double x : cand[m]) {
      p.pa_x[m] = x;
      self(self, m + 1);
    }
  };
  recurse(recurse, 0);
  return best;
}

/// Golden-section maximisation of a unimodal f on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, int iters = 100) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && (b - a) > 1e-14; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

/// Type-II search with the last segment's phase pinned to zero (a common
/// phase rotation leaves the MSE unchanged). For M = 2 the free phase is
/// scanned on `theta_points` grid values and, when `refine` is set, polished
/// by golden section around the best grid value. Only M <= 2 is supported.
inline JointResult sa2_reduced_exhaustive(const RadioConfig& cfg, const Scene& scene, std::size_t q_grid,
                                          std::size_t theta_points = 720, const std::vector<double>& extra = {},
                                          bool refine = true) {
  const std::size_t m_count = scene.num_segments();
  if (m_count > 2) throw std::invalid_argument("sa2_reduced_exhaustive: only M <= 2 is tractable");
  JointResult best;
  Placement p;
  p.architecture = Architecture::SA2;
  p.pa_x.assign(m_count, 0.0);
  p.phases = std::vector<double>(m_count, 0.0);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto wrap = [&](double t) {
    t = std::fmod(t, two_pi);
    if (t < 0.0) t += two_pi;
    return t >= two_pi ? 0.0 : t;
  };
  auto mse_at = [&](double theta) {
    (*p.phases)[0] = wrap(theta);
    ++best.evaluations;
    return mse_min(eff_channel_sa2(cfg, scene, p), cfg.p_tx, cfg.noise_var).mse;
  };
  auto consider = [&](double theta, double v) {
    if (v < best.mse) {
      best.mse = v;
      best.placement = p;
      (*best.placement.phases)[0] = theta;
    }
  };

  if (m_count == 1) {
    for (double x : candidates(scene.layout, 0, q_grid, extra)) {
      p.pa_x[0] = x;
      consider(0.0, mse_at(0.0));
    }
    return best;
  }

  const double step = two_pi / static_cast<double>(theta_points);
  const auto c0 = candidates(scene.layout, 0, q_grid, extra);
  const auto c1 = candidates(scene.layout, 1, q_grid, extra);
  for (double x0 : c0) {
    for (double x1 : c1) {
      p.pa_x = {x0, x1};
      (*p.phases)[0] = 0.0;
      if (!validate_placement(scene.layout, p, cfg.spacing()).feasible()) continue;
      double local_best = std::numeric_limits<double>::infinity();
      double local_theta = 0.0;
      for (std::size_t i = 0; i < theta_points; ++i) {
        const double th = static_cast<double>(i) * step;
        const double v = mse_at(th);
        if (v < local_best) {
          local_best = v;
          local_theta = th;
        }
      }
      if (refine) {
        const double th = golden_max([&](double t) { return -mse_at(t); }, local_theta - step, local_theta + step);
        const double v = mse_at(th);
        if (v < local_best) {
          local_best = v;
          local_theta = wrap(th);
        }
      }
      consider(local_theta, local_best);
    }
  }
  return best;
}

}  // namespace swan::oracle
