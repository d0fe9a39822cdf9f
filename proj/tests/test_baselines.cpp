// Copyright 2026 The sfsplace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "sfsplace/baselines.hpp"

using namespace sfsplace;

namespace {

// Independent admissibility test: p is upstream of the disc for some
// direction n in the range when its projection onto n is behind the disc and
// its offset across n is within the radius. Checked on a fine sweep.
bool admissible_sweep(Point2 p, const CircularRegion& region, double a0, double a1) {
  for (int i = 0; i <= 20000; ++i) {
    const double a = a0 + (a1 - a0) * i / 20000.0;
    const Point2 n{std::cos(a), std::sin(a)};
    const Point2 rel = p - region.center;
    const double along = dot(rel, n);
    const double across = rel.x * n.y - rel.y * n.x;
    if (along < 0.0 && std::abs(across) <= region.radius) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("square boundary candidates", "[baselines]") {
  const auto c = square_boundary_candidates({0.0, 0.0}, 3.0, 200);
  REQUIRE(c.size() == 200);
  CHECK(c[0] == Point2{-1.5, -1.5});
  CHECK(std::abs(c[1].x - (-1.44)) < 1e-12);
  CHECK(c[1].y == -1.5);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Point2 d = c[(i + 1) % c.size()] - c[i];
    CHECK(std::abs(std::abs(d.x) + std::abs(d.y) - 0.06) < 1e-12);
    CHECK(std::max(std::abs(c[i].x), std::abs(c[i].y)) == Catch::Approx(1.5));
  }
  // Counterclockwise: second edge climbs the right side.
  CHECK(c[50] == Point2{1.5, -1.5});
  CHECK(c[51].y > c[50].y);
  CHECK_THROWS_AS(square_boundary_candidates({}, 0.0, 4), PreconditionError);
}

TEST_CASE("regular B spreads over the whole loop", "[baselines]") {
  const auto b = regular_placement_b(200, 20);
  REQUIRE(b.size() == 20);
  for (int i = 0; i < 20; ++i) CHECK(b[i] == 10 * i);
  CHECK(regular_placement_b(7, 3) == std::vector<int>{0, 2, 4});
  CHECK_THROWS_AS(regular_placement_b(5, 6), PreconditionError);
}

TEST_CASE("facing test agrees with a direction sweep", "[baselines]") {
  const CircularRegion region{{0.5, 0.3}, 0.5};
  const double a0 = -std::numbers::pi / 4;
  const double a1 = std::numbers::pi / 4;
  const auto c = square_boundary_candidates({0.0, 0.0}, 3.0, 200);
  int admissible = 0;
  for (const auto& p : c) {
    const bool fast = faces_incoming_waves(p, region, a0, a1);
    CHECK(fast == admissible_sweep(p, region, a0, a1));
    admissible += fast ? 1 : 0;
  }
  CHECK(admissible > 20);
  CHECK(admissible < 200);
}

TEST_CASE("regular A stays on the admissible arc and uses both ends", "[baselines]") {
  const CircularRegion region{{0.5, 0.3}, 0.5};
  const double a0 = -std::numbers::pi / 4;
  const double a1 = std::numbers::pi / 4;
  const auto c = square_boundary_candidates({0.0, 0.0}, 3.0, 200);
  const auto a = regular_placement_a(c, region, a0, a1, 20);
  REQUIRE(a.size() == 20);
  for (int idx : a) CHECK(faces_incoming_waves(c[idx], region, a0, a1));
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] != a[i - 1]);
  // Waves travel towards +x, so sources sit on the left side.
  double mean_x = 0.0;
  for (int idx : a) mean_x += c[idx].x / 20.0;
  CHECK(mean_x < 0.0);
  // Arc endpoints are used.
  const int first = a.front();
  const int last = a.back();
  CHECK_FALSE(faces_incoming_waves(c[(first + 199) % 200], region, a0, a1));
  CHECK_FALSE(faces_incoming_waves(c[(last + 1) % 200], region, a0, a1));
}

TEST_CASE("regular A edge cases", "[baselines]") {
  const CircularRegion region{{0.0, 0.0}, 0.5};
  const auto c = square_boundary_candidates({0.0, 0.0}, 3.0, 40);
  CHECK(regular_placement_a(c, region, -4.0, 4.0, 8) == regular_placement_b(40, 8));
  CHECK_THROWS_AS(regular_placement_a(c, region, 0.0, 0.1, 30), PreconditionError);
  CHECK_THROWS_AS(regular_placement_a(c, region, 0.5, 0.1, 3), PreconditionError);
  CHECK(regular_placement_a(c, region, 0.0, 0.1, 1).size() == 1);
}
