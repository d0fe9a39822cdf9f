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
#include <random>
#include <set>

#include "catch_amalgamated.hpp"
#include "sfsplace/room.hpp"
#include "sfsplace/verify.hpp"

using namespace sfsplace;

TEST_CASE("image count matches brute-force enumeration", "[room]") {
  for (int order = 0; order <= 8; ++order) {
    const RoomModel room(5.0, 4.0, 0.8, order);
    CHECK(static_cast<int>(image_sources(room, {0.3, -0.2}).size()) == verify::image_count_bruteforce(order));
  }
  CHECK(verify::image_count_bruteforce(1) == 5);
}

TEST_CASE("first-order images mirror the source in each wall", "[room]") {
  const RoomModel room(5.0, 4.0, {0.1, 0.2, 0.3, 0.4}, 1);
  const auto images = image_sources(room, {1.0, 0.5});
  REQUIRE(images.size() == 5);
  CHECK(images[0].position == Point2{1.0, 0.5});
  CHECK(images[0].gain == 1.0);
  std::set<std::pair<double, double>> expected{{-6.0, 0.5}, {4.0, 0.5}, {1.0, -4.5}, {1.0, 3.5}};
  for (std::size_t i = 1; i < images.size(); ++i) {
    CHECK(images[i].order == 1);
    CHECK(expected.count({images[i].position.x, images[i].position.y}) == 1);
  }
  for (std::size_t i = 1; i < images.size(); ++i) {
    const auto& p = images[i].position;
    if (p.x < -2.5) CHECK(images[i].gain == 0.1);
    if (p.x > 2.5) CHECK(images[i].gain == 0.2);
    if (p.y < -2.0) CHECK(images[i].gain == 0.3);
    if (p.y > 2.0) CHECK(images[i].gain == 0.4);
  }
}

TEST_CASE("anechoic walls and order 0 reduce to the free field", "[room]") {
  const Frequency f(600.0);
  const Point2 src{0.7, -1.1};
  const Point2 p{-0.4, 0.9};
  CHECK(std::abs(room_transfer(RoomModel(5.0, 4.0, 0.8, 0), p, src, f) - green2d(p, src, f)) < 1e-15);
  CHECK(std::abs(room_transfer(RoomModel(5.0, 4.0, 0.0, 6), p, src, f) - green2d(p, src, f)) < 1e-15);
}

TEST_CASE("image ordering is by reflection count", "[room]") {
  const auto images = image_sources(RoomModel(5.0, 4.0, 0.8, 6), {0.2, 0.1});
  for (std::size_t i = 1; i < images.size(); ++i) CHECK(images[i - 1].order <= images[i].order);
}

TEST_CASE("room expansion matches image summation", "[room]") {
  const RoomModel room(5.0, 4.0, 0.8, 3);
  const CircularRegion region{{0.5, 0.3}, 0.5};
  const Frequency f(800.0);
  const auto cfg = ExpansionConfig::for_region(region, f);
  const Point2 src{-1.5, -1.2};
  const auto c = room_transfer_coeffs(room, src, cfg, f);
  for (double a = 0.0; a < 6.28; a += 0.9) {
    const Point2 p = region.center + Point2{0.4 * std::cos(a), 0.4 * std::sin(a)};
    const cplx ref = room_transfer(room, p, src, f);
    CHECK(std::abs(evaluate_expansion(c, p, f) - ref) < 1e-7 * std::abs(ref) + 1e-10);
  }
}

TEST_CASE("room preconditions", "[room]") {
  CHECK_THROWS_AS(RoomModel(5.0, -1.0, 0.8), PreconditionError);
  CHECK_THROWS_AS(RoomModel(5.0, 4.0, 1.2), PreconditionError);
  CHECK_THROWS_AS(RoomModel(5.0, 4.0, 0.8, -1), PreconditionError);
  const RoomModel room(5.0, 4.0, 0.8, 2);
  CHECK_THROWS_AS(image_sources(room, {3.0, 0.0}), DomainError);
  CHECK_THROWS_AS(room_transfer(room, {0.0, 2.5}, {0.0, 0.0}, Frequency(100.0)), DomainError);
  // A source inside the expansion disc cannot be expanded.
  const auto cfg = ExpansionConfig::for_region({{0.0, 0.0}, 0.5}, Frequency(100.0));
  CHECK_THROWS_AS(room_transfer_coeffs(room, {0.1, 0.0}, cfg, Frequency(100.0)), PreconditionError);
}

TEST_CASE("order-2 transfer equals a hand-listed image sum", "[room]") {
  // 2 x 2 m room, corners at (+-1, +-1), source (0.3, -0.2).
  const RoomModel room(2.0, 2.0, {0.9, 0.8, 0.7, 0.6}, 2);
  const Point2 s{0.3, -0.2};
  const double bl = 0.9, br = 0.8, bb = 0.7, bt = 0.6;
  struct Img { double x, y, g; };
  const std::vector<Img> list{
      {0.3, -0.2, 1.0},
      {-2.3, -0.2, bl}, {1.7, -0.2, br}, {0.3, -1.8, bb}, {0.3, 2.2, bt},
      {-3.7, -0.2, bl * br}, {4.3, -0.2, bl * br}, {0.3, 3.8, bb * bt}, {0.3, -4.2, bb * bt},
      {-2.3, -1.8, bl * bb}, {-2.3, 2.2, bl * bt}, {1.7, -1.8, br * bb}, {1.7, 2.2, br * bt}};
  const Frequency f(450.0);
  const Point2 p{-0.4, 0.5};
  cplx ref = 0.0;
  for (const auto& i : list) ref += i.g * green2d(p, {i.x, i.y}, f);
  CHECK(image_sources(room, s).size() == list.size());
  CHECK(std::abs(room_transfer(room, p, s, f) - ref) < 1e-13 * std::abs(ref));
}

TEST_CASE("room expansion agrees at random interior points for orders 0 to 3", "[room]") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const CircularRegion region{{0.5, 0.3}, 0.5};
  const Frequency f(1000.0);
  const auto cfg = ExpansionConfig::for_region(region, f);
  const Point2 src{-1.5, 0.66};
  for (int order = 0; order <= 3; ++order) {
    const RoomModel room(5.0, 4.0, 0.8, order);
    const auto images = image_sources(room, src);
    const auto c = room_transfer_coeffs(room, src, cfg, f);
    if (order == 0) CHECK((c.values - pointsource_coeffs(src, cfg, f).values).norm() == 0.0);
    for (int i = 0; i < 50; ++i) {
      const double r = region.radius * std::sqrt(u(rng));
      const double a = 2.0 * std::numbers::pi * u(rng);
      const Point2 p = region.center + Point2{r * std::cos(a), r * std::sin(a)};
      const cplx ref = room_transfer(images, p, f);
      CHECK(std::abs(evaluate_expansion(c, p, f) - ref) < 1e-5 * std::abs(ref));
    }
  }
}

TEST_CASE("rigid walls only ever add images", "[room]") {
  std::size_t previous = 0;
  for (int order = 0; order <= 6; ++order) {
    const auto images = image_sources(RoomModel(3.0, 2.0, 1.0, order), {0.1, 0.2});
    CHECK(images.size() > previous);
    for (std::size_t i = 0; i < previous; ++i) CHECK(images[i].order <= order - 1);
    for (std::size_t i = previous; i < images.size(); ++i) CHECK(images[i].order == order);
    for (const auto& img : images) CHECK(img.gain == 1.0);
    previous = images.size();
  }
}
