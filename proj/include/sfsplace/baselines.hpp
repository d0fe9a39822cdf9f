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

// Candidate layouts and regular (equal-spacing) reference placements.

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sfsplace/error.hpp"
#include "sfsplace/geometry.hpp"

namespace sfsplace {

/// `count` points at equal arc-length intervals on the boundary of an
/// axis-aligned square, starting at the lower-left corner and running
/// counterclockwise. The result is ordered along the loop.
inline std::vector<Point2> square_boundary_candidates(Point2 center, double side, int count) {
  if (!(side > 0.0) || count < 1) throw PreconditionError("square_boundary_candidates: need side > 0, count >= 1");
  const double perimeter = 4.0 * side;
  const double half = 0.5 * side;
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double s = perimeter * i / count;
    const int edge = std::min(3, static_cast<int>(s / side));
    const double t = s - edge * side;
    Point2 p;
    switch (edge) {
      case 0: p = {-half + t, -half}; break;
      case 1: p = {half, -half + t}; break;
      case 2: p = {half - t, half}; break;
      default: p = {-half, half - t}; break;
    }
    out.push_back(center + p);
  }
  return out;
}

/// Indices floor(i N / L), i = 0..L-1: equal spacing around the whole loop.
inline std::vector<int> regular_placement_b(int candidate_count, int count) {
  if (count < 0 || count > candidate_count) throw PreconditionError("regular_placement_b: need 0 <= L <= N");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(static_cast<int>((static_cast<long long>(i) * candidate_count) / count));
  }
  return out;
}

/// True when some plane wave with propagation direction in [angle_min,
/// angle_max] that passes through the region also passes through p on its
/// way in, i.e. p lies upstream of the region for that direction.
inline bool faces_incoming_waves(Point2 p, const CircularRegion& region, double angle_min,
                                 double angle_max) {
  const Point2 to_center = region.center - p;
  const double dist = to_center.norm();
  if (dist <= region.radius) return false;
  const double alpha = to_center.angle();
  const double half = std::asin(region.radius / dist);
  // Directions hitting the disc: [alpha - half, alpha + half]. Shift the
  // wave range by multiples of 2 pi to test every overlap.
  const double two_pi = 2.0 * std::numbers::pi;
  for (int k = -2; k <= 2; ++k) {
    const double lo = angle_min + k * two_pi;
    const double hi = angle_max + k * two_pi;
    if (lo <= alpha + half && alpha - half <= hi) return true;
  }
  return false;
}

/// Equal spacing restricted to the candidates facing the incoming-wave
/// range. Candidates must be ordered along a closed loop; the admissible
/// ones are walked in loop order from the start of their run and L of them
/// are taken at indices round(i (n-1) / (L-1)), so both ends of the arc are
/// used. A range covering the full circle falls back to regular_placement_b.
inline std::vector<int> regular_placement_a(std::span<const Point2> candidates,
                                            const CircularRegion& region, double angle_min,
                                            double angle_max, int count) {
  const int n = static_cast<int>(candidates.size());
  if (!(angle_min < angle_max)) throw PreconditionError("regular_placement_a: need angle_min < angle_max");
  if (angle_max - angle_min >= 2.0 * std::numbers::pi - 1e-12) return regular_placement_b(n, count);

  std::vector<bool> admissible(static_cast<std::size_t>(n));
  int total = 0;
  for (int i = 0; i < n; ++i) {
    admissible[i] = faces_incoming_waves(candidates[i], region, angle_min, angle_max);
    total += admissible[i] ? 1 : 0;
  }
  if (total == 0) throw PreconditionError("regular_placement_a: no candidate faces the incoming-wave range");
  if (total == n) return regular_placement_b(n, count);
  if (count > total) {
    throw PreconditionError("regular_placement_a: L = " + std::to_string(count) + " exceeds the " +
                            std::to_string(total) + " admissible candidates");
  }

  int start = 0;
  for (int i = 0; i < n; ++i) {
    if (admissible[i] && !admissible[(i + n - 1) % n]) {
      start = i;
      break;
    }
  }
  std::vector<int> arc;
  for (int step = 0; step < n; ++step) {
    const int i = (start + step) % n;
    if (admissible[i]) arc.push_back(i);
  }
  std::vector<int> out;
  if (count == 1) {
    out.push_back(arc[arc.size() / 2]);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    const double pos = static_cast<double>(i) * (total - 1) / (count - 1);
    out.push_back(arc[static_cast<std::size_t>(std::lround(pos))]);
  }
  return out;
}

}  // namespace sfsplace
