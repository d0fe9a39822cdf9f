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
#include <random>

#include "catch_amalgamated.hpp"
#include "sfsplace/synthesis.hpp"
#include "sfsplace/verify.hpp"

using namespace sfsplace;

TEST_CASE("closed-form W equals polar quadrature", "[synthesis]") {
  const auto r = verify::check_weight_matrix();
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("off-center quadrature W gives the regional energy", "[synthesis]") {
  const CircularRegion region{{0.3, -0.2}, 0.4};
  const Frequency f(500.0);
  const ExpansionConfig cfg(truncation_order(f, {{0.0, 0.0}, 0.8}), {0.0, 0.0}, 0.8);
  const auto w = weight_matrix_quadrature(region, cfg, f, {256, 96}).entries;
  CHECK((w - w.adjoint()).cwiseAbs().maxCoeff() < 1e-14 * w.cwiseAbs().maxCoeff());
  const PlaneWave pw{1.1, {1.0, 0.0}};
  const auto b = planewave_coeffs(pw, cfg, f).values;
  // |plane wave|^2 = 1 everywhere, so the energy is the area.
  CHECK(std::abs(std::real(b.dot(w * b)) - region.area()) < 1e-8 * region.area());
}

TEST_CASE("quadrature requires enough angular nodes", "[synthesis]") {
  const CircularRegion region{{0.0, 0.0}, 0.5};
  const Frequency f(1000.0);
  const auto cfg = ExpansionConfig::for_region(region, f);
  CHECK_THROWS_AS(weight_matrix_quadrature(region, cfg, f, {8, 16}), PreconditionError);
  CHECK_THROWS_AS(weight_matrix_circle({{0.1, 0.0}, 0.5}, cfg, f), PreconditionError);
}

TEST_CASE("synthesis lambda uses the largest Gram eigenvalue", "[synthesis]") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXcd c = verify::random_complex(9, 5, rng);
  const Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(9, 9) * 2.0;
  const Eigen::MatrixXcd gram = c.adjoint() * w * c;
  CHECK_THAT(synthesis_lambda(c, w), Catch::Matchers::WithinRel(1e-3 * verify::power_iteration(gram), 1e-9));
  CHECK(synthesis_lambda(Eigen::MatrixXcd(9, 0), w) == 0.0);
}

TEST_CASE("regularized solve satisfies the normal equations", "[synthesis]") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXcd c = verify::random_complex(11, 4, rng);
  const Eigen::MatrixXcd b0 = verify::random_complex(11, 11, rng);
  const Eigen::MatrixXcd w = b0 * b0.adjoint();
  const Eigen::VectorXcd b = verify::random_complex(11, 1, rng).col(0);
  const double lambda = 0.3;
  const auto d = solve_weighted(c, w, b, lambda);
  const Eigen::VectorXcd residual = (c.adjoint() * w * c) * d + lambda * d - c.adjoint() * w * b;
  CHECK(residual.norm() < 1e-10 * b.norm() * w.norm());
  // Any perturbation increases the cost.
  const Eigen::VectorXcd e = verify::random_complex(4, 1, rng).col(0) * 1e-3;
  CHECK(synthesis_cost(c, w, b, d + e, lambda) > synthesis_cost(c, w, b, d, lambda));
  CHECK_THROWS_AS(solve_weighted(c, w, b, 0.0), PreconditionError);
  CHECK_THROWS_AS(solve_weighted(c, w, b.head(5), lambda), PreconditionError);
}

TEST_CASE("a source's own field is reproduced exactly", "[synthesis]") {
  const CircularRegion region{{0.0, 0.0}, 0.5};
  const Frequency f(800.0);
  const std::vector<Point2> sources{{1.5, 0.0}, {0.0, 1.5}, {-1.5, -0.3}};
  const auto ctrl = region_grid(region, 0.05);
  const auto grid = region_grid(region, 0.01);
  const Acoustics free;
  const auto prob = build_pressure_matching(ctrl, sources, [&](Point2 p) { return green2d(p, sources[1], f); }, f);
  const DrivingSignals d{solve_weighted(prob.transfer, prob.weight.entries, prob.desired, 1e-14), f.hz()};
  const auto syn = synthesize_field(sources, d, grid, f);
  Eigen::VectorXcd des(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) des(i) = green2d(grid[i], sources[1], f);
  CHECK(sdr(des, syn, 1e-4) >= 100.0);
}

TEST_CASE("pressure matching approaches weighted mode matching on a dense grid", "[synthesis]") {
  const CircularRegion region{{0.0, 0.0}, 0.5};
  const Frequency f(600.0);
  const auto cfg = ExpansionConfig::for_region(region, f);
  std::vector<Point2> sources;
  for (int i = 0; i < 12; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 12.0;
    sources.push_back({1.5 * std::cos(a), 1.5 * std::sin(a)});
  }
  const Acoustics free;
  const auto c = transfer_coeff_matrix(free, sources, cfg, f).matrix;
  const auto w = weight_matrix_circle(region, cfg, f);
  const PlaneWave pw{0.3, {1.0, 0.0}};
  const auto b = planewave_coeffs(pw, cfg, f);
  const double lambda = 1e-2;
  const auto d_wmm = solve_wmm(c, w, b, lambda, f);
  const double spacing = 0.01;
  const auto ctrl = region_grid(region, spacing);
  const double cell = region.area() / static_cast<double>(ctrl.size());
  const auto pm = build_pressure_matching(ctrl, sources, [&](Point2 p) { return pw.value(p, f); }, f, free, cell);
  const auto d_pm = solve_weighted(pm.transfer, pm.weight.entries, pm.desired, lambda);
  CHECK((d_pm - d_wmm.values).norm() < 1e-2 * d_wmm.values.norm());
}

TEST_CASE("SDR definition", "[synthesis]") {
  Eigen::VectorXcd des(3);
  des << cplx{1.0, 0.0}, cplx{0.0, 1.0}, cplx{-1.0, 0.0};
  CHECK(sdr(des, des) == kSdrCapDb);
  const Eigen::VectorXcd syn = 0.9 * des;
  CHECK_THAT(sdr(des, syn, 0.5), Catch::Matchers::WithinAbs(20.0, 1e-12));
  CHECK_THROWS_AS(sdr(Eigen::VectorXcd::Zero(3), syn), DomainError);
  CHECK_THROWS_AS(sdr(des, syn.head(2)), PreconditionError);
}

TEST_CASE("transfer matrices do not depend on thread count", "[synthesis]") {
  const Acoustics room(RoomModel(5.0, 4.0, 0.8, 4));
  const Frequency f(900.0);
  const auto pts = region_grid({{0.5, 0.3}, 0.5}, 0.05);
  const std::vector<Point2> src{{-1.5, -1.5}, {1.5, 0.2}, {0.0, 1.5}};
  const auto a = transfer_matrix_points(room, pts, src, f, 1);
  const auto b = transfer_matrix_points(room, pts, src, f, 4);
  CHECK(a == b);
}
