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

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "sfsplace/error.hpp"

namespace sfsplace {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b]. Nodes by Newton iteration on
/// P_n from the Chebyshev-like initial guess.
inline QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw PreconditionError("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

/// n equispaced nodes on the periodic interval [a, a + 2 pi) with equal
/// weights; exact for trigonometric polynomials of degree < n.
inline QuadratureRule periodic_trapezoid(int n, double a = 0.0) {
  if (n < 1) throw PreconditionError("periodic_trapezoid: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, 2.0 * std::numbers::pi / n);
  for (int i = 0; i < n; ++i) rule.nodes[i] = a + 2.0 * std::numbers::pi * i / n;
  return rule;
}

}  // namespace sfsplace
