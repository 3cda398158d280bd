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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "swan/geometry.hpp"

namespace swan {

using Complex = std::complex<double>;

/// Effective per-user channels h_1..h_K.
using ChannelVector = std::vector<Complex>;

inline constexpr double kSpeedOfLight = 299792458.0;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

/// Carrier, waveguide and power parameters. Powers are linear (watts).
struct RadioConfig {
  double f_c = 28e9;
  double n_eff = 1.4;
  double kappa = 0.0;       // dB/m
  double delta_min = 0.5 * kSpeedOfLight / 28e9; // m, half a wavelength at the default carrier
  double p_tx = 1e-2;       // W (10 dBm)
  double noise_var = 1e-12; // W (-90 dBm)

  [[nodiscard]] double lambda() const noexcept { return kSpeedOfLight / f_c; }
  [[nodiscard]] double k0() const noexcept { return 2.0 * std::numbers::pi / lambda(); }
  [[nodiscard]] double eta() const noexcept {
    return kSpeedOfLight * kSpeedOfLight / (16.0 * std::numbers::pi * std::numbers::pi * f_c * f_c);
  }
  [[nodiscard]] double lambda_g() const noexcept { return lambda() / n_eff; }
  [[nodiscard]] double spacing() const noexcept { return delta_min; }

  void validate() const {
    if (!(f_c > 0.0)) throw std::invalid_argument("RadioConfig: f_c must be positive");
    if (!(n_eff >= 1.0)) throw std::invalid_argument("RadioConfig: n_eff must be >= 1");
    if (!(kappa >= 0.0)) throw std::invalid_argument("RadioConfig: kappa must be >= 0");
    if (!(delta_min > 0.0)) throw std::invalid_argument("RadioConfig: delta_min must be positive");
    if (!(p_tx > 0.0)) throw std::invalid_argument("RadioConfig: p_tx must be positive");
    if (!(noise_var > 0.0)) throw std::invalid_argument("RadioConfig: noise_var must be positive");
  }

  [[nodiscard]] RadioConfig with_kappa(double k) const {
    RadioConfig c = *this;
    c.kappa = k;
    return c;
  }
};

/// Free-space LoS coefficient sqrt(eta) e^{-j k0 r} / r.
inline Complex freespace_gain(const RadioConfig& cfg, const Point3& user, const Point3& pa) {
  const double r = distance(user, pa);
  if (!(r > 0.0)) throw std::domain_error("freespace_gain: user and PA coincide");
  return std::polar(std::sqrt(cfg.eta()) / r, -cfg.k0() * r);
}

/// Guided propagation over l = pa_x - feed_x: 10^{-kappa l / 20} e^{-j 2 pi l / lambda_g}.
inline Complex inwaveguide_gain(const RadioConfig& cfg, double pa_x, double feed_x) {
  const double len = pa_x - feed_x;
  if (len < 0.0) throw std::invalid_argument("inwaveguide_gain: PA lies upstream of the feed point");
  if (len == 0.0) return {1.0, 0.0};
  const double mag = cfg.kappa == 0.0 ? 1.0 : std::pow(10.0, -cfg.kappa * len / 20.0);
  return std::polar(mag, -2.0 * std::numbers::pi * len / cfg.lambda_g());
}

inline Point3 pa_position(const WaveguideLayout& layout, double pa_x) noexcept { return {pa_x, 0.0, layout.height}; }

/// scale * e^{j theta} h_i h_o(u_k) for every user; the building block of
/// all three architectures.
inline void accumulate_segment(const RadioConfig& cfg, const Scene& scene, std::size_t segment, double pa_x,
                               Complex weight, std::vector<Complex>& out) {
  const double feed = scene.layout.feed(segment);
  const Complex guided = weight * inwaveguide_gain(cfg, std::max(pa_x, feed), feed);
  const Point3 pa = pa_position(scene.layout, pa_x);
  for (std::size_t k = 0; k < scene.num_users(); ++k)
    out[k] += guided * freespace_gain(cfg, scene.drop.users[k].position(), pa);
}

namespace detail {

inline void require_in_segment(const Scene& scene, std::size_t segment, double pa_x, const char* who) {
  if (segment >= scene.num_segments()) throw std::invalid_argument(std::string(who) + ": segment out of range");
  if (!(pa_x >= scene.layout.feed(segment) - kSegmentBoundTol &&
        pa_x <= scene.layout.segment_end(segment) + kSegmentBoundTol))
    throw std::invalid_argument(std::string(who) + ": PA outside its segment");
}

inline void require_feasible(const RadioConfig& cfg, const Scene& scene, const Placement& placement, const char* who) {
  if (placement.segment.has_value()) throw std::invalid_argument(std::string(who) + ": expected one PA per segment");
  const auto report = validate_placement(scene.layout, placement, cfg.spacing());
  if (!report.feasible()) throw std::invalid_argument(std::string(who) + ": " + report.violations.front().message);
}

}  // namespace detail

/// Segment selection: only `segment` feeds the RF chain.
inline ChannelVector eff_channel_ss(const RadioConfig& cfg, const Scene& scene, std::size_t segment, double pa_x) {
  detail::require_in_segment(scene, segment, pa_x, "eff_channel_ss");
  ChannelVector h(scene.num_users(), Complex{});
  accumulate_segment(cfg, scene, segment, pa_x, Complex{1.0, 0.0}, h);
  return h;
}

/// Type-I aggregation: (1 / sqrt(M)) sum_m h_i h_o.
inline ChannelVector eff_channel_sa1(const RadioConfig& cfg, const Scene& scene, const Placement& placement) {
  detail::require_feasible(cfg, scene, placement, "eff_channel_sa1");
  const std::size_t m_count = scene.num_segments();
  const Complex w{1.0 / std::sqrt(static_cast<double>(m_count)), 0.0};
  ChannelVector h(scene.num_users(), Complex{});
  for (std::size_t m = 0; m < m_count; ++m) accumulate_segment(cfg, scene, m, placement.pa_x[m], w, h);
  return h;
}

/// Type-II aggregation: (1 / sqrt(M)) sum_m e^{j theta_m} h_i h_o.
inline ChannelVector eff_channel_sa2(const RadioConfig& cfg, const Scene& scene, const Placement& placement) {
  if (!placement.phases.has_value()) throw std::invalid_argument("eff_channel_sa2: placement carries no phases");
  if (placement.phases->size() != scene.num_segments())
    throw std::invalid_argument("eff_channel_sa2: need one phase per segment");
  detail::require_feasible(cfg, scene, placement, "eff_channel_sa2");
  const std::size_t m_count = scene.num_segments();
  const double w = 1.0 / std::sqrt(static_cast<double>(m_count));
  ChannelVector h(scene.num_users(), Complex{});
  for (std::size_t m = 0; m < m_count; ++m)
    accumulate_segment(cfg, scene, m, placement.pa_x[m], std::polar(w, (*placement.phases)[m]), h);
  return h;
}

/// Dispatch on placement.architecture.
inline ChannelVector effective_channel(const RadioConfig& cfg, const Scene& scene, const Placement& placement) {
  switch (placement.architecture) {
    case Architecture::SS:
    case Architecture::PassBaseline:
      if (!placement.segment.has_value() || placement.pa_x.size() != 1)
        throw std::invalid_argument("effective_channel: single-PA placement needs a segment index");
      return eff_channel_ss(cfg, scene, *placement.segment, placement.pa_x.front());
    case Architecture::SA1: return eff_channel_sa1(cfg, scene, placement);
    case Architecture::SA2: return eff_channel_sa2(cfg, scene, placement);
  }
  throw std::invalid_argument("effective_channel: unknown architecture");
}

}  // namespace swan
