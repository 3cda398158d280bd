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
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swan/rng.hpp"

namespace swan {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(const Point3& a, const Point3& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Rectangle x in [0, d_x], y in [-d_y/2, d_y/2] on the ground plane.
struct ServiceRegion {
  double d_x = 100.0;
  double d_y = 20.0;

  ServiceRegion() = default;
  ServiceRegion(double dx, double dy) : d_x(dx), d_y(dy) {
    if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("ServiceRegion: d_x and d_y must be positive");
  }
};

struct User {
  double x = 0.0;
  double y = 0.0;

  [[nodiscard]] Point3 position() const noexcept { return {x, y, 0.0}; }
};

struct UserDrop {
  std::vector<User> users;

  [[nodiscard]] std::size_t size() const noexcept { return users.size(); }
};

/// M equal segments of length L along y = 0 at height d, fed from the left end.
struct WaveguideLayout {
  std::size_t m_segments = 0;
  double seg_length = 0.0;
  std::vector<double> feed_x;
  double height = 0.0;

  [[nodiscard]] double feed(std::size_t m) const { return feed_x.at(m); }
  [[nodiscard]] double segment_end(std::size_t m) const { return feed_x.at(m) + seg_length; }
  [[nodiscard]] double midpoint(std::size_t m) const { return feed_x.at(m) + 0.5 * seg_length; }
};

struct Scene {
  ServiceRegion region;
  WaveguideLayout layout;
  UserDrop drop;

  [[nodiscard]] std::size_t num_users() const noexcept { return drop.size(); }
  [[nodiscard]] std::size_t num_segments() const noexcept { return layout.m_segments; }
};

enum class Architecture { SS, SA1, SA2, PassBaseline };

inline std::string_view to_string(Architecture a) noexcept {
  switch (a) {
    case Architecture::SS: return "SS";
    case Architecture::SA1: return "SA1";
    case Architecture::SA2: return "SA2";
    case Architecture::PassBaseline: return "PASS";
  }
  return "?";
}

/// Active pinching-antenna positions.
///
/// SA architectures hold one position per segment. SS and the PASS baseline
/// hold a single position together with the index of the hosting segment.
/// Phases are only present for Type-II aggregation.
struct Placement {
  Architecture architecture = Architecture::SA1;
  std::vector<double> pa_x;
  std::optional<std::vector<double>> phases;
  std::optional<std::size_t> segment;
};

/// Slack on the segment-bound clause; grid endpoints are computed as feed + L
/// so this only absorbs caller-side rounding.
inline constexpr double kSegmentBoundTol = 1e-9;

// ---------------------------------------------------------------------------

inline WaveguideLayout build_layout(std::size_t m_segments, double seg_length, const ServiceRegion& region,
                                    double height) {
  if (m_segments < 1) throw std::invalid_argument("build_layout: m_segments must be >= 1");
  if (!(seg_length > 0.0)) throw std::invalid_argument("build_layout: seg_length must be positive");
  if (!(height > 0.0)) throw std::invalid_argument("build_layout: height must be positive");
  if (!(region.d_x > 0.0) || !(region.d_y > 0.0))
    throw std::invalid_argument("build_layout: region dimensions must be positive");

  WaveguideLayout layout;
  layout.m_segments = m_segments;
  layout.seg_length = seg_length;
  layout.height = height;
  const double first = 0.5 * (region.d_x - static_cast<double>(m_segments) * seg_length);
  layout.feed_x.reserve(m_segments);
  for (std::size_t m = 0; m < m_segments; ++m) layout.feed_x.push_back(first + static_cast<double>(m) * seg_length);
  return layout;
}

/// K i.i.d. uniform users over the region. Draw order is (x_0, y_0, x_1, ...),
/// so a drop with more users extends a smaller drop with the same seed.
inline UserDrop sample_users(const ServiceRegion& region, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("sample_users: k must be >= 1");
  CounterRng rng(seed);
  UserDrop drop;
  drop.users.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double x = rng.uniform(0.0, region.d_x);
    const double y = rng.uniform(-0.5 * region.d_y, 0.5 * region.d_y);
    drop.users.push_back({x, y});
  }
  return drop;
}

struct PlacementViolation {
  enum class Kind { OutOfSegment, Spacing, WrongCount, BadPhase };
  Kind kind;
  std::size_t first = 0;
  std::size_t second = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<PlacementViolation> violations;

  [[nodiscard]] bool feasible() const noexcept { return violations.empty(); }
  explicit operator bool() const noexcept { return feasible(); }
};

inline ValidationReport validate_placement(const WaveguideLayout& layout, const Placement& placement, double delta) {
  ValidationReport report;
  auto add = [&](PlacementViolation::Kind kind, std::size_t a, std::size_t b, std::string msg) {
    report.violations.push_back({kind, a, b, std::move(msg)});
  };

  // Segment index of every listed PA.
  std::vector<std::size_t> hosts;
  if (placement.segment.has_value()) {
    if (placement.pa_x.size() != 1) {
      add(PlacementViolation::Kind::WrongCount, 0, 0, "single-segment placement must list exactly one PA");
      return report;
    }
    if (*placement.segment >= layout.m_segments) {
      add(PlacementViolation::Kind::WrongCount, *placement.segment, 0, "segment index out of range");
      return report;
    }
    hosts.push_back(*placement.segment);
  } else {
    if (placement.pa_x.size() != layout.m_segments) {
      add(PlacementViolation::Kind::WrongCount, placement.pa_x.size(), layout.m_segments,
          "placement must list one PA per segment");
      return report;
    }
    for (std::size_t m = 0; m < layout.m_segments; ++m) hosts.push_back(m);
  }

  for (std::size_t i = 0; i < hosts.size(); ++i) {
    const double x = placement.pa_x[i];
    const std::size_t m = hosts[i];
    if (!(x >= layout.feed(m) - kSegmentBoundTol && x <= layout.segment_end(m) + kSegmentBoundTol)) {
      add(PlacementViolation::Kind::OutOfSegment, m, m,
          "PA " + std::to_string(m) + " lies outside its segment");
    }
  }
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    for (std::size_t j = i + 1; j < hosts.size(); ++j) {
      if (std::abs(placement.pa_x[i] - placement.pa_x[j]) < delta) {
        add(PlacementViolation::Kind::Spacing, hosts[i], hosts[j],
            "PAs " + std::to_string(hosts[i]) + " and " + std::to_string(hosts[j]) + " closer than minimum spacing");
      }
    }
  }
  if (placement.phases.has_value()) {
    const auto& th = *placement.phases;
    if (th.size() != placement.pa_x.size()) {
      add(PlacementViolation::Kind::WrongCount, th.size(), placement.pa_x.size(), "phase count mismatch");
    } else {
      for (std::size_t i = 0; i < th.size(); ++i) {
        if (!(th[i] >= 0.0 && th[i] < 2.0 * std::numbers::pi))
          add(PlacementViolation::Kind::BadPhase, i, i, "phase " + std::to_string(i) + " outside [0, 2pi)");
      }
    }
  }
  return report;
}

/// Q candidate positions psi_0 + q L / (Q - 1), endpoints exact.
inline std::vector<double> grid_points(const WaveguideLayout& layout, std::size_t segment, std::size_t q) {
  if (q < 2) throw std::invalid_argument("grid_points: q must be >= 2");
  if (segment >= layout.m_segments) throw std::invalid_argument("grid_points: segment out of range");
  const double feed = layout.feed(segment);
  const double step = layout.seg_length / static_cast<double>(q - 1);
  std::vector<double> pts(q);
  for (std::size_t i = 0; i + 1 < q; ++i) pts[i] = feed + static_cast<double>(i) * step;
  pts[q - 1] = layout.segment_end(segment);
  return pts;
}

/// Grid points of `segment` at distance >= delta from every PA in other_pa_x.
/// May be empty; callers keep the incumbent in that case.
inline std::vector<double> feasible_grid(const WaveguideLayout& layout, std::size_t segment, std::size_t q,
                                         const std::vector<double>& other_pa_x, double delta) {
  auto pts = grid_points(layout, segment, q);
  std::erase_if(pts, [&](double x) {
    for (double o : other_pa_x)
      if (std::abs(x - o) < delta) return true;
    return false;
  });
  return pts;
}

/// Positions of every segment except `segment`.
inline std::vector<double> other_positions(const std::vector<double>& pa_x, std::size_t segment) {
  std::vector<double> out;
  out.reserve(pa_x.size());
  for (std::size_t i = 0; i < pa_x.size(); ++i)
    if (i != segment) out.push_back(pa_x[i]);
  return out;
}

}  // namespace swan
