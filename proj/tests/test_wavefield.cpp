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

#include "catch_amalgamated.hpp"
#include "sfsplace/wavefield.hpp"

using namespace sfsplace;

TEST_CASE("truncation order", "[wavefield]") {
  const Frequency f(1000.0);
  const double kr = f.wavenumber() * 0.5;
  CHECK(truncation_order(f, {{0.0, 0.0}, 0.5}) == static_cast<int>(std::ceil(kr + 4.0 * std::cbrt(kr))) + 10);
  CHECK(truncation_order(f, {{0.0, 0.0}, 1e-12}) == 11);
  CHECK(truncation_order(f, {{0.0, 0.0}, 0.5}) >= static_cast<int>(std::ceil(kr)));
}

TEST_CASE("plane-wave expansion reproduces the plane wave", "[wavefield]") {
  const CircularRegion region{{0.5, 0.3}, 0.5};
  for (double hz : {100.0, 1000.0, 2000.0}) {
    const Frequency f(hz);
    const auto cfg = ExpansionConfig::for_region(region, f);
    const PlaneWave pw{0.4, {0.7, -0.2}};
    const auto b = planewave_coeffs(pw, cfg, f);
    for (double a = 0.0; a < 6.28; a += 0.7) {
      for (double r : {0.0, 0.2, 0.5}) {
        const Point2 p = region.center + Point2{r * std::cos(a), r * std::sin(a)};
        CHECK(std::abs(evaluate_expansion(b, p, f) - pw.value(p, f)) < 1e-9);
      }
    }
  }
}

TEST_CASE("point-source expansion reproduces the Green's function", "[wavefield]") {
  const CircularRegion region{{0.0, 0.0}, 0.5};
  const Frequency f(700.0);
  const auto cfg = ExpansionConfig::for_region(region, f);
  const Point2 src{1.1, -0.6};
  const auto c = pointsource_coeffs(src, cfg, f);
  for (double a = 0.0; a < 6.28; a += 0.5) {
    const Point2 p{0.45 * std::cos(a), 0.45 * std::sin(a)};
    const cplx ref = green2d(p, src, f);
    CHECK(std::abs(evaluate_expansion(c, p, f) - ref) < 1e-7 * std::abs(ref));
  }
}

TEST_CASE("negative-order basis functions", "[wavefield]") {
  const ExpansionConfig cfg(6, {0.1, 0.2}, 0.5);
  const Frequency f(500.0);
  const auto psi = cylindrical_basis({0.3, -0.1}, cfg, f);
  const double phi = (Point2{0.3, -0.1} - cfg.center).angle();
  for (int m = 1; m <= 6; ++m) {
    const cplx ratio = psi(cfg.index(-m)) / psi(cfg.index(m));
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    CHECK(std::abs(ratio - sign * std::exp(kJ * (-2.0 * m * phi))) < 1e-12);
  }
}

TEST_CASE("preconditions", "[wavefield]") {
  const Frequency f(1000.0);
  const ExpansionConfig small(2, {0.0, 0.0}, 0.5);
  CHECK_THROWS_AS(planewave_coeffs({0.0, {1.0, 0.0}}, small, f), PreconditionError);
  const auto cfg = ExpansionConfig::for_region({{0.0, 0.0}, 0.5}, f);
  CHECK_THROWS_AS(pointsource_coeffs({0.2, 0.1}, cfg, f), PreconditionError);
  const auto b = planewave_coeffs({0.0, {1.0, 0.0}}, cfg, f);
  CHECK_THROWS_AS(evaluate_expansion(b, {0.6, 0.0}, f), PreconditionError);
  CHECK_THROWS_AS(green2d({1.0, 1.0}, {1.0, 1.0}, f), PreconditionError);
  CHECK_THROWS_AS(ExpansionConfig(-1, {0.0, 0.0}, 0.5), PreconditionError);
  CHECK_THROWS(Frequency(-5.0));
}

TEST_CASE("randomized exterior sources at twice the radius", "[wavefield]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const double hz = 100.0 + 1900.0 * u(rng);
    const CircularRegion region{{u(rng) - 0.5, u(rng) - 0.5}, 0.2 + 0.5 * u(rng)};
    const Frequency f(hz);
    const auto cfg = ExpansionConfig::for_region(region, f);
    const double a = 2.0 * std::numbers::pi * u(rng);
    const double d = region.radius * (2.0 + 2.0 * u(rng));
    const Point2 src = region.center + Point2{d * std::cos(a), d * std::sin(a)};
    const auto c = pointsource_coeffs(src, cfg, f);
    for (int i = 0; i < 32; ++i) {
      const double b = 2.0 * std::numbers::pi * i / 32.0;
      const Point2 p = region.center + Point2{region.radius * std::cos(b), region.radius * std::sin(b)};
      const cplx ref = green2d(p, src, f);
      worst = std::max(worst, std::abs(evaluate_expansion(c, p, f) - ref) / std::abs(ref));
    }
  }
  INFO("worst relative error " << worst);
  CHECK(worst < 1e-6);
}
