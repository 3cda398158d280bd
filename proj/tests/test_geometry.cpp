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


#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include "swan/channel.hpp"
#include "swan/geometry.hpp"
#include "swan/rng.hpp"

using namespace swan;
using Catch::Approx;

namespace {

// Independent O(M^2) feasibility scan used to cross-check validate_placement.
bool brute_feasible(const WaveguideLayout& layout, const std::vector<double>& x, double delta) {
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (x[m] < layout.feed_x[m] - 1e-9 || x[m] > layout.feed_x[m] + layout.seg_length + 1e-9) return false;
    for (std::size_t n = 0; n < x.size(); ++n)
      if (n != m && std::fabs(x[m] - x[n]) < delta) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("build_layout centres the span above the region") {
  SECTION("single segment covering the region") {
    const auto l = build_layout(1, 100.0, ServiceRegion(100, 20), 3.0);
    REQUIRE(l.feed_x == std::vector<double>{0.0});
    CHECK(l.segment_end(0) == 100.0);
  }
  SECTION("two short segments") {
    const auto l = build_layout(2, 1.0, ServiceRegion(100, 20), 3.0);
    CHECK(l.feed_x == std::vector<double>{49.0, 50.0});
  }
  SECTION("tiling") {
    const auto l = build_layout(5, 10.0, ServiceRegion(50, 20), 3.0);
    CHECK(l.feed_x == std::vector<double>{0, 10, 20, 30, 40});
  }
  SECTION("overhanging span is still centred") {
    const auto l = build_layout(4, 40.0, ServiceRegion(100, 20), 3.0);
    CHECK(l.feed_x.front() == -30.0);
  }
  SECTION("feeds are exactly L apart") {
    for (std::size_t m : {1u, 3u, 7u, 10u}) {
      const auto l = build_layout(m, 1.0, ServiceRegion(100, 20), 3.0);
      for (std::size_t i = 1; i < m; ++i) CHECK(l.feed_x[i] - l.feed_x[i - 1] == 1.0);
    }
  }
  SECTION("invalid arguments") {
    CHECK_THROWS_AS(build_layout(0, 1.0, ServiceRegion(100, 20), 3.0), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(2, 0.0, ServiceRegion(100, 20), 3.0), std::invalid_argument);
    CHECK_THROWS_AS(build_layout(2, 1.0, ServiceRegion(100, 20), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(ServiceRegion(0, 20), std::invalid_argument);
  }
}

TEST_CASE("sample_users") {
  const ServiceRegion region(100, 20);
  SECTION("deterministic for a seed") {
    const auto a = sample_users(region, 50, 42);
    const auto b = sample_users(region, 50, 42);
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.users.data(), b.users.data(), a.size() * sizeof(User)) == 0);
    const auto c = sample_users(region, 50, 43);
    CHECK(std::memcmp(a.users.data(), c.users.data(), a.size() * sizeof(User)) != 0);
  }
  SECTION("cross-platform bit pattern of the first draw") {
    // uniform() is pure integer arithmetic plus one exact scaling.
    CounterRng rng(1);
    const std::uint64_t first = rng();
    CHECK(first == mix64(1 + kWeylIncrement));
  }
  SECTION("sample means match uniform moments within 3 sigma") {
    const std::size_t k = 10000;
    const auto d = sample_users(region, k, 1);
    double mx = 0, my = 0;
    for (const auto& u : d.users) {
      REQUIRE(u.x >= 0.0);
      REQUIRE(u.x <= 100.0);
      REQUIRE(u.y >= -10.0);
      REQUIRE(u.y <= 10.0);
      mx += u.x;
      my += u.y;
    }
    mx /= k;
    my /= k;
    const double se_x = 100.0 / std::sqrt(12.0 * k);
    const double se_y = 20.0 / std::sqrt(12.0 * k);
    CHECK(std::fabs(mx - 50.0) < 3 * se_x);
    CHECK(std::fabs(my) < 3 * se_y);
  }
  SECTION("single user") {
    const auto d = sample_users(region, 1, 7);
    REQUIRE(d.size() == 1);
    CHECK(d.users[0].x >= 0.0);
    CHECK(d.users[0].x <= 100.0);
  }
  SECTION("prefix property") {
    const auto small = sample_users(region, 3, 9);
    const auto big = sample_users(region, 8, 9);
    for (std::size_t i = 0; i < 3; ++i) CHECK(small.users[i].x == big.users[i].x);
  }
  CHECK_THROWS_AS(sample_users(region, 0, 1), std::invalid_argument);
}

TEST_CASE("validate_placement") {
  const RadioConfig cfg;
  const double delta = cfg.lambda() / 2;
  REQUIRE(delta == Approx(0.00535343675).epsilon(1e-9));
  const auto layout = build_layout(3, 1.0, ServiceRegion(100, 20), 3.0);

  Placement p;
  p.pa_x = layout.feed_x;
  CHECK(validate_placement(layout, p, delta).feasible());

  p.pa_x[0] = layout.feed_x[0] - 0.1;
  auto rep = validate_placement(layout, p, delta);
  REQUIRE_FALSE(rep.feasible());
  CHECK(rep.violations.front().kind == PlacementViolation::Kind::OutOfSegment);

  // Two PAs straddling the boundary between segments 0 and 1, 1 mm apart.
  p.pa_x = {layout.segment_end(0) - 0.0005, layout.feed_x[1] + 0.0005, layout.midpoint(2)};
  rep = validate_placement(layout, p, delta);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].kind == PlacementViolation::Kind::Spacing);
  CHECK(rep.violations[0].first == 0);
  CHECK(rep.violations[0].second == 1);

  SECTION("single-segment placements") {
    Placement s;
    s.architecture = Architecture::SS;
    s.pa_x = {layout.midpoint(1)};
    s.segment = 1;
    CHECK(validate_placement(layout, s, delta).feasible());
    s.segment = 0;
    CHECK_FALSE(validate_placement(layout, s, delta).feasible());
  }
  SECTION("phases must lie in [0, 2pi)") {
    Placement q;
    q.pa_x = {layout.midpoint(0), layout.midpoint(1), layout.midpoint(2)};
    q.phases = std::vector<double>{0.0, 1.0, 2 * std::numbers::pi};
    rep = validate_placement(layout, q, delta);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].kind == PlacementViolation::Kind::BadPhase);
  }
  SECTION("agrees with an independent pairwise scan") {
    CounterRng rng(5);
    for (int t = 0; t < 2000; ++t) {
      Placement r;
      for (std::size_t m = 0; m < 3; ++m) r.pa_x.push_back(rng.uniform(layout.feed_x[m] - 0.05, layout.segment_end(m) + 0.05));
      // Push some pairs onto the boundary region.
      if (t % 3 == 0) r.pa_x[1] = r.pa_x[0] + rng.uniform(-0.01, 0.01);
      CHECK(validate_placement(layout, r, delta).feasible() == brute_feasible(layout, r.pa_x, delta));
    }
  }
}

TEST_CASE("grid_points") {
  const auto layout = build_layout(2, 1.0, ServiceRegion(100, 20), 3.0);
  auto g = grid_points(layout, 1, 2);
  CHECK(g == std::vector<double>{50.0, 51.0});

  g = grid_points(layout, 0, 11);
  REQUIRE(g.size() == 11);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] - g[i - 1] == Approx(0.1).margin(1e-12));

  const auto wide = build_layout(1, 10.0, ServiceRegion(100, 20), 3.0);
  g = grid_points(wide, 0, 1000);
  REQUIRE(g.size() == 1000);
  CHECK(g.front() == wide.feed_x[0]);
  CHECK(g.back() == wide.feed_x[0] + 10.0);
  CHECK(g[1] - g[0] == Approx(10.0 / 999).epsilon(1e-12));
  for (std::size_t i = 1; i < g.size(); ++i) REQUIRE(g[i] > g[i - 1]);

  CHECK_THROWS_AS(grid_points(layout, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(grid_points(layout, 2, 10), std::invalid_argument);
}

TEST_CASE("feasible_grid") {
  const auto layout = build_layout(3, 1.0, ServiceRegion(100, 20), 3.0);
  CHECK(feasible_grid(layout, 1, 50, {}, 0.005) == grid_points(layout, 1, 50));

  SECTION("PA at the left boundary removes the first grid point") {
    const double step = 1.0 / 10;
    const auto g = feasible_grid(layout, 1, 11, {layout.feed_x[1] - 1e-12}, step);
    REQUIRE(g.size() == 10);
    CHECK(g.front() == Approx(layout.feed_x[1] + step));
  }
  SECTION("matches a brute filter on random instances") {
    CounterRng rng(11);
    for (int t = 0; t < 200; ++t) {
      const std::size_t q = 2 + (rng() % 60);
      const double delta = rng.uniform(0.0, 0.3);
      std::vector<double> others = {rng.uniform(48.0, 52.0), rng.uniform(49.0, 50.2)};
      const auto got = feasible_grid(layout, 1, q, others, delta);
      std::vector<double> want;
      for (double x : grid_points(layout, 1, q)) {
        bool ok = true;
        for (double o : others) ok = ok && !(std::fabs(x - o) < delta);
        if (ok) want.push_back(x);
      }
      REQUIRE(got == want);
      for (double x : got)
        for (double o : others) CHECK(std::fabs(x - o) >= delta);
    }
  }
  SECTION("everything excluded") {
    CHECK(feasible_grid(layout, 1, 11, {layout.midpoint(1)}, 2.0).empty());
  }
}
