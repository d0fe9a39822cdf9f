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

// Frequency-domain image source model of a rectangular 2D room.
//
// The room is centered on the origin with walls at x = +-size_x/2 and
// y = +-size_y/2. Images are generated on the Allen-Berkley lattice in
// corner coordinates u = x + size_x/2:
//
//   u_img = (1 - 2q) u + 2 n size_x,   gain beta_left^{|n - q|} beta_right^{|n|}
//
// and likewise in y; the reflection count of an image is the sum of the four
// exponents.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "sfsplace/error.hpp"
#include "sfsplace/geometry.hpp"
#include "sfsplace/wavefield.hpp"

namespace sfsplace {

/// Wall order in reflection arrays.
enum Wall : int { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

struct RoomModel {
  double size_x = 0.0;
  double size_y = 0.0;
  std::array<double, 4> reflection{};  // indexed by Wall
  int max_reflection_order = 10;

  RoomModel() = default;
  RoomModel(double sx, double sy, std::array<double, 4> beta, int max_order = 10)
      : size_x(sx), size_y(sy), reflection(beta), max_reflection_order(max_order) {
    validate();
  }
  RoomModel(double sx, double sy, double beta, int max_order = 10)
      : RoomModel(sx, sy, {beta, beta, beta, beta}, max_order) {}

  void validate() const {
    if (!(size_x > 0.0) || !(size_y > 0.0)) throw PreconditionError("RoomModel: sizes must be > 0");
    for (double b : reflection) {
      if (!(b >= 0.0 && b <= 1.0)) {
        throw PreconditionError("RoomModel: reflection coefficients must lie in [0, 1]");
      }
    }
    if (max_reflection_order < 0) {
      throw PreconditionError("RoomModel: max_reflection_order must be >= 0");
    }
  }

  bool strictly_inside(Point2 p) const {
    return std::abs(p.x) < 0.5 * size_x && std::abs(p.y) < 0.5 * size_y;
  }
};

struct ImageSource {
  Point2 position;
  double gain = 1.0;
  int order = 0;  // total reflection count
};

namespace detail {

struct AxisImage {
  double coord;
  double gain;
  int count;
};

// All images along one axis with reflection count <= max_count, ordered by
// count then by (n, q).
inline std::vector<AxisImage> axis_images(double coord, double size, double beta_low,
                                          double beta_high, int max_count) {
  const double u = coord + 0.5 * size;
  std::vector<AxisImage> out;
  const int reach = max_count + 1;
  for (int n = -reach; n <= reach; ++n) {
    for (int q = 0; q <= 1; ++q) {
      const int low = std::abs(n - q);
      const int high = std::abs(n);
      const int count = low + high;
      if (count > max_count) continue;
      const double u_img = (1 - 2 * q) * u + 2.0 * n * size;
      out.push_back({u_img - 0.5 * size, std::pow(beta_low, low) * std::pow(beta_high, high),
                     count});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const AxisImage& a, const AxisImage& b) { return a.count < b.count; });
  return out;
}

}  // namespace detail

/// Images with total reflection count <= room.max_reflection_order, the
/// source itself first. Order is deterministic: by total count, then x
/// image, then y image.
inline std::vector<ImageSource> image_sources(const RoomModel& room, Point2 source) {
  room.validate();
  if (!source.finite() || !room.strictly_inside(source)) {
    throw DomainError("image_sources: source (" + std::to_string(source.x) + ", " +
                      std::to_string(source.y) + ") is not strictly inside the room");
  }
  const int max_order = room.max_reflection_order;
  const auto xs = detail::axis_images(source.x, room.size_x, room.reflection[kLeft],
                                      room.reflection[kRight], max_order);
  const auto ys = detail::axis_images(source.y, room.size_y, room.reflection[kBottom],
                                      room.reflection[kTop], max_order);
  std::vector<ImageSource> out;
  for (int total = 0; total <= max_order; ++total) {
    for (const auto& ix : xs) {
      for (const auto& iy : ys) {
        if (ix.count + iy.count != total) continue;
        out.push_back({{ix.coord, iy.coord}, ix.gain * iy.gain, total});
      }
    }
  }
  return out;
}

/// Reverberant transfer function: gain-weighted sum of free-field Green's
/// functions over the image set, accumulated in image order.
inline cplx room_transfer(const std::vector<ImageSource>& images, Point2 eval_point,
                          const Frequency& freq) {
  cplx sum = 0.0;
  for (const auto& img : images) {
    if (img.gain == 0.0) continue;
    sum += img.gain * green2d(eval_point, img.position, freq);
  }
  return sum;
}

inline cplx room_transfer(const RoomModel& room, Point2 eval_point, Point2 source,
                          const Frequency& freq) {
  if (!eval_point.finite() || !room.strictly_inside(eval_point)) {
    throw DomainError("room_transfer: evaluation point is not inside the room");
  }
  return room_transfer(image_sources(room, source), eval_point, freq);
}

/// Interior expansion of the reverberant transfer function: gain-weighted
/// sum of point-source coefficients over all images with nonzero gain.
inline ExpansionCoeffs room_transfer_coeffs(const RoomModel& room, Point2 source,
                                            const ExpansionConfig& cfg, const Frequency& freq) {
  ExpansionCoeffs out = ExpansionCoeffs::zeros(cfg);
  std::size_t idx = 0;
  for (const auto& img : image_sources(room, source)) {
    if (img.gain != 0.0) {
      if (!(distance(img.position, cfg.center) > cfg.radius)) {
        throw PreconditionError("room_transfer_coeffs: image #" + std::to_string(idx) + " at (" +
                                std::to_string(img.position.x) + ", " +
                                std::to_string(img.position.y) + "), reflection order " +
                                std::to_string(img.order) + ", lies inside the expansion disc");
      }
      out.values += img.gain * pointsource_coeffs(img.position, cfg, freq).values;
    }
    ++idx;
  }
  return out;
}

}  // namespace sfsplace
