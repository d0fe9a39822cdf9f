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
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "sfsplace/error.hpp"

namespace sfsplace {

using cplx = std::complex<double>;
inline constexpr cplx kJ{0.0, 1.0};

inline constexpr double kDefaultSoundSpeed = 343.0;

/// Point in the plane, meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;

  double norm() const { return std::hypot(x, y); }
  double angle() const { return std::atan2(y, x); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

/// Temporal frequency with the sound speed used to derive the wavenumber.
class Frequency {
 public:
  explicit Frequency(double hz, double sound_speed = kDefaultSoundSpeed)
      : hz_(hz), sound_speed_(sound_speed) {
    if (!(hz > 0.0) || !std::isfinite(hz)) {
      throw PreconditionError("Frequency: hz must be finite and > 0, got " + std::to_string(hz));
    }
    if (!(sound_speed > 0.0) || !std::isfinite(sound_speed)) {
      throw PreconditionError("Frequency: sound speed must be finite and > 0");
    }
  }

  double hz() const { return hz_; }
  double sound_speed() const { return sound_speed_; }
  double omega() const { return 2.0 * std::numbers::pi * hz_; }
  double wavenumber() const { return omega() / sound_speed_; }

 private:
  double hz_;
  double sound_speed_;
};

/// Disc-shaped target region.
struct CircularRegion {
  Point2 center;
  double radius = 0.0;

  CircularRegion() = default;
  CircularRegion(Point2 c, double r) : center(c), radius(r) {
    if (!(r > 0.0) || !std::isfinite(r) || !c.finite()) {
      throw PreconditionError("CircularRegion: radius must be finite and > 0");
    }
  }

  bool contains(Point2 p) const { return distance(p, center) <= radius; }
  double area() const { return std::numbers::pi * radius * radius; }
};

/// Points of a square lattice with the given spacing that fall inside the
/// region. Row-major in y then x, so the order is reproducible.
inline std::vector<Point2> region_grid(const CircularRegion& region, double spacing) {
  if (!(spacing > 0.0)) throw PreconditionError("region_grid: spacing must be > 0");
  const int half = static_cast<int>(std::floor(region.radius / spacing));
  std::vector<Point2> pts;
  for (int iy = -half; iy <= half; ++iy) {
    for (int ix = -half; ix <= half; ++ix) {
      const Point2 offset{ix * spacing, iy * spacing};
      if (offset.norm() <= region.radius) pts.push_back(region.center + offset);
    }
  }
  return pts;
}

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace sfsplace
