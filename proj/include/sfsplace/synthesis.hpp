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

// Least-squares sound field synthesis.
//
// Every method here reduces to the same regularized weighted problem
//
//   minimize (C d - b)^H W (C d - b) + lambda |d|^2
//
// with the columns of C describing each loudspeaker and b the desired field,
// either as expansion coefficients (weighted / plain mode matching) or as
// pressures at control points (pressure matching).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfsplace/error.hpp"
#include "sfsplace/geometry.hpp"
#include "sfsplace/parallel.hpp"
#include "sfsplace/quadrature.hpp"
#include "sfsplace/room.hpp"
#include "sfsplace/specfun.hpp"
#include "sfsplace/wavefield.hpp"

namespace sfsplace {

inline constexpr double kSdrCapDb = 300.0;

/// Hermitian weight W_{mn} = integral over the region of conj(psi_m) psi_n.
struct WeightMatrix {
  Eigen::MatrixXcd entries;
  int order = 0;

  static WeightMatrix identity(int size) {
    return {Eigen::MatrixXcd::Identity(size, size), (size - 1) / 2};
  }
};

/// Free field, or a rectangular room modelled by image sources.
class Acoustics {
 public:
  Acoustics() = default;
  explicit Acoustics(RoomModel room) : room_(std::move(room)) { room_->validate(); }

  bool reverberant() const { return room_.has_value(); }
  const std::optional<RoomModel>& room() const { return room_; }

  /// Image list of a source; the source alone in free field.
  std::vector<ImageSource> images(Point2 source) const {
    if (room_) return image_sources(*room_, source);
    return {ImageSource{source, 1.0, 0}};
  }

  cplx transfer(Point2 eval_point, Point2 source, const Frequency& freq) const {
    if (room_) return room_transfer(*room_, eval_point, source, freq);
    return green2d(eval_point, source, freq);
  }

  ExpansionCoeffs coeffs(Point2 source, const ExpansionConfig& cfg, const Frequency& freq) const {
    if (room_) return room_transfer_coeffs(*room_, source, cfg, freq);
    return pointsource_coeffs(source, cfg, freq);
  }

 private:
  std::optional<RoomModel> room_;
};

/// Expansion coefficients of every candidate's transfer function, one column
/// per candidate.
struct TransferCoeffMatrix {
  Eigen::MatrixXcd matrix;
  std::vector<Point2> positions;
  ExpansionConfig config;

  Eigen::Index candidates() const { return matrix.cols(); }

  /// Columns of the listed candidates, in list order.
  Eigen::MatrixXcd select(std::span<const int> indices) const {
    Eigen::MatrixXcd out(matrix.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) out.col(i) = matrix.col(indices[i]);
    return out;
  }
};

inline TransferCoeffMatrix transfer_coeff_matrix(const Acoustics& acoustics,
                                                 std::vector<Point2> candidates,
                                                 const ExpansionConfig& cfg,
                                                 const Frequency& freq, int threads = 1) {
  TransferCoeffMatrix out{Eigen::MatrixXcd(cfg.size(), static_cast<Eigen::Index>(candidates.size())),
                          std::move(candidates), cfg};
  parallel_for(out.positions.size(), threads, [&](std::size_t n) {
    out.matrix.col(static_cast<Eigen::Index>(n)) =
        acoustics.coeffs(out.positions[n], cfg, freq).values;
  });
  return out;
}

/// G(point_i | source_l) for every point/source pair.
inline Eigen::MatrixXcd transfer_matrix_points(const Acoustics& acoustics,
                                               std::span<const Point2> points,
                                               std::span<const Point2> sources,
                                               const Frequency& freq, int threads = 1) {
  if (acoustics.reverberant()) {
    for (Point2 p : points) {
      if (!acoustics.room()->strictly_inside(p)) {
        throw DomainError("transfer_matrix_points: evaluation point outside the room");
      }
    }
  }
  std::vector<std::vector<ImageSource>> images;
  images.reserve(sources.size());
  for (Point2 s : sources) images.push_back(acoustics.images(s));
  Eigen::MatrixXcd g(static_cast<Eigen::Index>(points.size()),
                     static_cast<Eigen::Index>(sources.size()));
  parallel_for(points.size(), threads, [&](std::size_t i) {
    for (std::size_t l = 0; l < sources.size(); ++l) {
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) =
          room_transfer(images[l], points[i], freq);
    }
  });
  return g;
}

/// Closed-form W for a disc centered on the expansion origin:
///   W_mm = pi R^2 [J_m(kR)^2 - J_{m-1}(kR) J_{m+1}(kR)],  W_mn = 0 for m != n.
inline WeightMatrix weight_matrix_circle(const CircularRegion& region, const ExpansionConfig& cfg,
                                         const Frequency& freq) {
  if (distance(region.center, cfg.center) > 1e-12 * (1.0 + region.radius)) {
    throw PreconditionError("weight_matrix_circle: expansion center must equal region center");
  }
  const int order = cfg.order;
  const double kr = freq.wavenumber() * region.radius;
  const auto j = specfun::bessel_j_table(order + 1, kr);
  const double area = region.area();
  WeightMatrix w{Eigen::MatrixXcd::Zero(cfg.size(), cfg.size()), order};
  for (int m = 0; m <= order; ++m) {
    // J_{-1} = -J_1
    const double below = (m == 0) ? -j[1] : j[m - 1];
    const double value = area * (j[m] * j[m] - below * j[m + 1]);
    w.entries(order + m, order + m) = value;
    w.entries(order - m, order - m) = value;
  }
  return w;
}

struct QuadratureResolution {
  int angular = 512;
  int radial = 256;
};

/// W by tensor polar quadrature: periodic trapezoid in angle, Gauss-Legendre
/// in radius. The angular sum depends only on n - m, so it is formed once per
/// difference and combined with the radial sums. The result is explicitly
/// Hermitian-symmetrized.
inline WeightMatrix weight_matrix_quadrature(const CircularRegion& region,
                                             const ExpansionConfig& cfg, const Frequency& freq,
                                             QuadratureResolution res = {}) {
  const int order = cfg.order;
  if (res.angular < 4 * order || res.angular < 1 || res.radial < 1) {
    throw PreconditionError("weight_matrix_quadrature: need at least 4M angular nodes");
  }
  const Point2 offset = region.center - cfg.center;
  const int size = cfg.size();
  const double k = freq.wavenumber();
  const auto radial = gauss_legendre(res.radial, 0.0, region.radius);
  const auto angular = periodic_trapezoid(res.angular);

  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(size, size);
  if (offset.norm() <= 1e-12 * (1.0 + region.radius)) {
    // Concentric: psi_m = J_m(kr) e^{j m phi} separates.
    Eigen::MatrixXd radial_sum = Eigen::MatrixXd::Zero(size, size);
    for (int i = 0; i < res.radial; ++i) {
      const double r = radial.nodes[i];
      const auto j = specfun::bessel_j_table(order, k * r);
      Eigen::VectorXd v(size);
      for (int m = -order; m <= order; ++m) {
        const double sign = (m < 0 && (-m) % 2 == 1) ? -1.0 : 1.0;
        v(m + order) = sign * j[std::abs(m)];
      }
      radial_sum.noalias() += (radial.weights[i] * r) * v * v.transpose();
    }
    std::vector<cplx> angular_sum(2 * size - 1, cplx{});
    for (int p = -(size - 1); p <= size - 1; ++p) {
      cplx s = 0.0;
      for (int a = 0; a < res.angular; ++a) {
        s += angular.weights[a] * std::exp(kJ * (p * angular.nodes[a]));
      }
      angular_sum[p + size - 1] = s;
    }
    for (int m = 0; m < size; ++m) {
      for (int n = 0; n < size; ++n) {
        w(m, n) = radial_sum(m, n) * angular_sum[n - m + size - 1];
      }
    }
  } else {
    // General position: accumulate conj(psi) psi^T node by node.
    for (int i = 0; i < res.radial; ++i) {
      const double r = radial.nodes[i];
      for (int a = 0; a < res.angular; ++a) {
        const double phi = angular.nodes[a];
        const Point2 p = region.center + Point2{r * std::cos(phi), r * std::sin(phi)};
        const Eigen::VectorXcd psi = cylindrical_basis(p, cfg, freq);
        w.noalias() += (radial.weights[i] * r * angular.weights[a]) * psi.conjugate() * psi.transpose();
      }
    }
  }
  WeightMatrix out{0.5 * (w + w.adjoint()), order};
  return out;
}

struct DrivingSignals {
  Eigen::VectorXcd values;
  double frequency_hz = 0.0;
};

struct SynthesisConfig {
  double lambda_select = 1e-5;
  double lambda_synth_scale = 1e-3;

  friend bool operator==(const SynthesisConfig&, const SynthesisConfig&) = default;

  void validate() const {
    if (!(lambda_select > 0.0) || !(lambda_synth_scale > 0.0)) {
      throw PreconditionError("SynthesisConfig: both regularization parameters must be > 0");
    }
  }
};

/// Weighted least-squares cost (C d - b)^H W (C d - b) + lambda |d|^2.
inline double synthesis_cost(const Eigen::MatrixXcd& c_sel, const Eigen::MatrixXcd& w,
                             const Eigen::VectorXcd& b, const Eigen::VectorXcd& d,
                             double lambda) {
  const Eigen::VectorXcd r = c_sel * d - b;
  return std::real(r.dot(w * r)) + lambda * d.squaredNorm();
}

/// d = (C^H W C + lambda I)^{-1} C^H W b by Cholesky.
inline Eigen::VectorXcd solve_weighted(const Eigen::MatrixXcd& c_sel, const Eigen::MatrixXcd& w,
                                       const Eigen::VectorXcd& b, double lambda) {
  if (!(lambda > 0.0)) throw PreconditionError("solve_wmm: lambda must be > 0");
  if (c_sel.rows() != w.rows() || b.size() != c_sel.rows()) {
    throw PreconditionError("solve_wmm: dimension mismatch");
  }
  const Eigen::MatrixXcd wc = w * c_sel;
  Eigen::MatrixXcd normal = c_sel.adjoint() * wc;
  normal = 0.5 * (normal + normal.adjoint()).eval();
  normal.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXcd> llt(normal);
  if (llt.info() != Eigen::Success) throw NumericalError("solve_wmm: normal matrix not positive definite");
  Eigen::VectorXcd d = llt.solve(wc.adjoint() * b);
  if (!d.allFinite()) throw NumericalError("solve_wmm: non-finite driving signals");
  return d;
}

inline DrivingSignals solve_wmm(const Eigen::MatrixXcd& c_sel, const WeightMatrix& w,
                                const ExpansionCoeffs& b, double lambda, const Frequency& freq) {
  return {solve_weighted(c_sel, w.entries, b.values, lambda), freq.hz()};
}

/// Mode matching: solve_wmm with W = I.
inline DrivingSignals solve_mode_matching(const Eigen::MatrixXcd& c_sel, const ExpansionCoeffs& b,
                                          double lambda, const Frequency& freq) {
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(c_sel.rows(), c_sel.rows());
  return {solve_weighted(c_sel, id, b.values, lambda), freq.hz()};
}

/// The (C, W, b) triple of a least-squares synthesis problem.
struct LinearProblem {
  Eigen::MatrixXcd transfer;
  WeightMatrix weight;
  Eigen::VectorXcd desired;
};

using FieldFunction = std::function<cplx(Point2)>;

/// Pressure matching: C_{il} = G(point_i | source_l), b_i = u_des(point_i),
/// W = cell_weight * I (identity by default).
inline LinearProblem build_pressure_matching(std::span<const Point2> control_points,
                                             std::span<const Point2> sources,
                                             const FieldFunction& desired, const Frequency& freq,
                                             const Acoustics& acoustics = {},
                                             double cell_weight = 1.0, int threads = 1) {
  if (control_points.empty()) throw PreconditionError("build_pressure_matching: no control points");
  LinearProblem out;
  out.transfer = transfer_matrix_points(acoustics, control_points, sources, freq, threads);
  const auto n = static_cast<Eigen::Index>(control_points.size());
  out.weight = {cell_weight * Eigen::MatrixXcd::Identity(n, n), -1};
  out.desired.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.desired(i) = desired(control_points[i]);
  return out;
}

/// u_syn(r) = sum_l d_l G(r | r_l) on every grid point.
inline Eigen::VectorXcd synthesize_field(std::span<const Point2> sources, const DrivingSignals& d,
                                         std::span<const Point2> grid, const Frequency& freq,
                                         const Acoustics& acoustics = {}, int threads = 1) {
  if (static_cast<std::size_t>(d.values.size()) != sources.size()) {
    throw PreconditionError("synthesize_field: one driving signal per source required");
  }
  return transfer_matrix_points(acoustics, grid, sources, freq, threads) * d.values;
}

/// 10 log10(sum |u_des|^2 / sum |u_des - u_syn|^2), capped at kSdrCapDb.
/// Equal cell areas cancel; the argument documents the grid.
inline double sdr(const Eigen::VectorXcd& u_des, const Eigen::VectorXcd& u_syn,
                  double cell_area = 1.0) {
  if (u_des.size() != u_syn.size()) throw PreconditionError("sdr: sample count mismatch");
  if (!(cell_area > 0.0)) throw PreconditionError("sdr: cell area must be > 0");
  const double signal = cell_area * u_des.squaredNorm();
  if (!(signal > 0.0)) throw DomainError("sdr: desired field has zero energy");
  const double error = cell_area * (u_des - u_syn).squaredNorm();
  if (error == 0.0) return kSdrCapDb;
  return std::min(kSdrCapDb, 10.0 * std::log10(signal / error));
}

/// Largest eigenvalue of C^H W C times scale (1e-3 by default).
inline double synthesis_lambda(const Eigen::MatrixXcd& c_sel, const Eigen::MatrixXcd& w,
                               double scale = 1e-3) {
  if (c_sel.cols() == 0) return 0.0;
  Eigen::MatrixXcd gram = c_sel.adjoint() * w * c_sel;
  gram = 0.5 * (gram + gram.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().maxCoeff()) * scale;
}

}  // namespace sfsplace
