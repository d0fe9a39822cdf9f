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

// 2D fields as interior cylindrical-harmonic expansions
//
//   u(r) = sum_{m=-M}^{M} c_m J_m(k r') e^{j m phi'}
//
// with (r', phi') polar coordinates about the expansion center. Coefficient
// vectors are always stored in ascending order m = -M..M, so c_m lives at
// index m + M.
//
// Fields use the e^{j k.r} plane-wave form and the outgoing Green's function
// (j/4) H0^(1)(k |r - r_s|); desired and synthesized fields share both.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "sfsplace/error.hpp"
#include "sfsplace/geometry.hpp"
#include "sfsplace/specfun.hpp"

namespace sfsplace {

/// Truncation order for a disc of the given radius: ceil(kR + 4 (kR)^{1/3}) + 10.
/// The cube-root term tracks the width of the J_m(kR) turning region so the
/// discarded tail stays small at high kR as well as low.
inline int truncation_order(const Frequency& freq, const CircularRegion& region) {
  const double kr = freq.wavenumber() * region.radius;
  return static_cast<int>(std::ceil(kr + 4.0 * std::cbrt(kr))) + 10;
}

/// Expansion origin, truncation order and the radius of the disc the
/// expansion is meant to represent.
struct ExpansionConfig {
  int order = 0;
  Point2 center;
  double radius = 0.0;

  ExpansionConfig() = default;
  ExpansionConfig(int m, Point2 c, double r) : order(m), center(c), radius(r) {
    if (m < 0) throw PreconditionError("ExpansionConfig: order must be >= 0");
    if (!(r > 0.0) || !c.finite()) {
      throw PreconditionError("ExpansionConfig: radius must be > 0 and center finite");
    }
  }

  /// Order chosen by truncation_order for this region and frequency.
  static ExpansionConfig for_region(const CircularRegion& region, const Frequency& freq) {
    return {truncation_order(freq, region), region.center, region.radius};
  }

  int size() const { return 2 * order + 1; }
  int index(int m) const { return m + order; }

  /// Throws unless order >= ceil(k radius).
  void require_adequate(const Frequency& freq) const {
    const int need = static_cast<int>(std::ceil(freq.wavenumber() * radius));
    if (order < need) {
      throw PreconditionError("ExpansionConfig: order " + std::to_string(order) +
                              " below ceil(kR) = " + std::to_string(need) + " at " +
                              std::to_string(freq.hz()) + " Hz");
    }
  }

  friend bool operator==(const ExpansionConfig&, const ExpansionConfig&) = default;
};

/// Coefficients c_{-M..M} of a field about config.center.
struct ExpansionCoeffs {
  Eigen::VectorXcd values;
  ExpansionConfig config;

  ExpansionCoeffs() = default;
  ExpansionCoeffs(Eigen::VectorXcd v, ExpansionConfig cfg) : values(std::move(v)), config(cfg) {
    if (values.size() != config.size()) {
      throw PreconditionError("ExpansionCoeffs: expected " + std::to_string(config.size()) +
                              " coefficients, got " + std::to_string(values.size()));
    }
  }

  static ExpansionCoeffs zeros(const ExpansionConfig& cfg) {
    return {Eigen::VectorXcd::Zero(cfg.size()), cfg};
  }

  cplx operator()(int m) const { return values(config.index(m)); }
  cplx& operator()(int m) { return values(config.index(m)); }
};

/// Plane wave amplitude * e^{j k (cos a, sin a) . r}; a is the propagation direction.
struct PlaneWave {
  double direction = 0.0;
  cplx amplitude{1.0, 0.0};

  cplx value(Point2 r, const Frequency& freq) const {
    const double k = freq.wavenumber();
    return amplitude * std::exp(kJ * k * (std::cos(direction) * r.x + std::sin(direction) * r.y));
  }
};

/// 2D free-field Green's function (j/4) H0^(1)(k |r - r_s|).
inline cplx green2d(Point2 eval_point, Point2 source, const Frequency& freq) {
  const double d = distance(eval_point, source);
  if (!(d > 0.0)) throw PreconditionError("green2d: evaluation point coincides with source");
  return 0.25 * kJ * specfun::hankel1_0(freq.wavenumber() * d);
}

/// psi_m(point) = J_m(k r') e^{j m phi'} for m = -M..M.
inline Eigen::VectorXcd cylindrical_basis(Point2 point, const ExpansionConfig& cfg,
                                          const Frequency& freq) {
  const Point2 rel = point - cfg.center;
  const double r = rel.norm();
  const double phi = rel.angle();
  const int order = cfg.order;
  const auto j = specfun::bessel_j_table(order, freq.wavenumber() * r);
  Eigen::VectorXcd psi(cfg.size());
  psi(order) = j[0];
  const cplx step = std::exp(kJ * phi);
  cplx rot = 1.0;
  for (int m = 1; m <= order; ++m) {
    rot *= step;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    psi(order + m) = j[m] * rot;
    psi(order - m) = sign * j[m] * std::conj(rot);
  }
  return psi;
}

/// sum_m c_m psi_m(point). The point must lie within the configured disc.
inline cplx evaluate_expansion(const ExpansionCoeffs& coeffs, Point2 point, const Frequency& freq) {
  const auto& cfg = coeffs.config;
  if (distance(point, cfg.center) > cfg.radius * (1.0 + 1e-9)) {
    throw PreconditionError("evaluate_expansion: point outside the expansion disc");
  }
  return (coeffs.values.array() * cylindrical_basis(point, cfg, freq).array()).sum();
}

/// Jacobi-Anger coefficients b_m = A e^{j k.c} j^m e^{-j m a}.
inline ExpansionCoeffs planewave_coeffs(const PlaneWave& pw, const ExpansionConfig& cfg,
                                        const Frequency& freq) {
  cfg.require_adequate(freq);
  const cplx center_phase = pw.value(cfg.center, freq);
  ExpansionCoeffs out = ExpansionCoeffs::zeros(cfg);
  constexpr cplx kPowJ[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  for (int m = -cfg.order; m <= cfg.order; ++m) {
    const cplx jm = kPowJ[((m % 4) + 4) % 4];
    out(m) = center_phase * jm * std::exp(-kJ * (m * pw.direction));
  }
  return out;
}

/// Graf addition theorem for an exterior point source:
///   c_m = (j/4) H_m^(1)(k d) e^{-j m phi_s},
/// with (d, phi_s) the source position relative to the expansion center.
inline ExpansionCoeffs pointsource_coeffs(Point2 source, const ExpansionConfig& cfg,
                                          const Frequency& freq) {
  cfg.require_adequate(freq);
  const Point2 rel = source - cfg.center;
  const double d = rel.norm();
  if (!(d > cfg.radius)) {
    throw PreconditionError("pointsource_coeffs: source at (" + std::to_string(source.x) + ", " +
                            std::to_string(source.y) + ") lies inside the expansion disc");
  }
  const double phi = rel.angle();
  const auto h = specfun::hankel1_table(cfg.order, freq.wavenumber() * d);
  ExpansionCoeffs out = ExpansionCoeffs::zeros(cfg);
  const cplx step = std::exp(-kJ * phi);
  cplx rot = 1.0;
  out(0) = 0.25 * kJ * h[0];
  for (int m = 1; m <= cfg.order; ++m) {
    rot *= step;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    out(m) = 0.25 * kJ * h[m] * rot;
    out(-m) = 0.25 * kJ * sign * h[m] * std::conj(rot);
  }
  return out;
}

}  // namespace sfsplace
