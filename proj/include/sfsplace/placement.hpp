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

// Mean-square-error loudspeaker placement.
//
// For a selection S of candidate columns of C, the regularized solution
// d = A C_S^H W b with A = (C_S^H W C_S + lambda I)^{-1} leaves the residual
// cost b^H D b, D = W - W C_S A C_S^H W. Averaged over desired fields b with
// mean mu and covariance Sigma, the placement cost is
//
//   J(S) = trace(D Sigma) + mu^H D mu = trace(D R),   R = Sigma + mu mu^H.
//
// With G = C^H W C and Q = C^H W R W C precomputed once,
//
//   J(S) = trace(W R) - trace(A Q_SS),
//
// and adding candidate i to S changes the cached inverse by a bordered
// (Sherman-Morrison) update. With a = G_{S,i}, h = A a and
// rho = G_ii + lambda - a^H h, the cost decreases by
//
//   gain_i = (h^H Q_SS h - 2 Re(h^H Q_{S,i}) + Q_ii) / rho,
//
// so every greedy step costs O(N l^2) instead of N fresh inversions.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfsplace/error.hpp"
#include "sfsplace/geometry.hpp"
#include "sfsplace/quadrature.hpp"
#include "sfsplace/specfun.hpp"
#include "sfsplace/synthesis.hpp"
#include "sfsplace/wavefield.hpp"

namespace sfsplace {

/// First and second moments of the desired coefficient vector b.
struct FieldPrior {
  Eigen::VectorXcd mean;
  Eigen::MatrixXcd covariance;
  Eigen::MatrixXcd second_moment;  // covariance + mean mean^H

  static FieldPrior from_moments(Eigen::VectorXcd mu, Eigen::MatrixXcd sigma) {
    FieldPrior p;
    p.second_moment = sigma + mu * mu.adjoint();
    p.mean = std::move(mu);
    p.covariance = std::move(sigma);
    p.validate();
    return p;
  }

  static FieldPrior deterministic(Eigen::VectorXcd b) {
    const auto n = b.size();
    return from_moments(std::move(b), Eigen::MatrixXcd::Zero(n, n));
  }

  Eigen::Index size() const { return mean.size(); }

  /// Hermitian to 1e-12 and PSD to -1e-10 trace; throws PreconditionError.
  void validate() const {
    const auto n = mean.size();
    if (covariance.rows() != n || covariance.cols() != n || second_moment.rows() != n) {
      throw PreconditionError("FieldPrior: inconsistent dimensions");
    }
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    if ((covariance - covariance.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw PreconditionError("FieldPrior: covariance is not Hermitian");
    }
    if (n > 0) {
      const Eigen::MatrixXcd herm = 0.5 * (covariance + covariance.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
      // Rounding floor relative to R covers near-deterministic priors.
      const double trace = std::max(0.0, std::real(covariance.trace()));
      const double floor = 1e-13 * std::max(1.0, second_moment.cwiseAbs().maxCoeff());
      if (eig.eigenvalues().minCoeff() < -1e-10 * trace - floor) {
        throw PreconditionError("FieldPrior: covariance is not positive semidefinite");
      }
    }
    const double r_scale = std::max(1.0, second_moment.cwiseAbs().maxCoeff());
    if ((second_moment - covariance - mean * mean.adjoint()).cwiseAbs().maxCoeff() >
        1e-12 * r_scale) {
      throw PreconditionError("FieldPrior: second moment inconsistent with mean and covariance");
    }
  }
};

/// Plane waves of fixed amplitude whose propagation direction is uniform on
/// [angle_min, angle_max] (radians).
struct DirectionRangePrior {
  double angle_min = 0.0;
  double angle_max = 0.0;
  cplx amplitude{1.0, 0.0};

  double width() const { return angle_max - angle_min; }
  void validate() const {
    if (!(angle_min < angle_max)) throw PreconditionError("DirectionRangePrior: need angle_min < angle_max");
  }
};

namespace detail {

// (1/width) * integral_a^b e^{j q phi} dphi, written around the midpoint so
// it stays accurate as the width shrinks.
inline cplx mean_exponential(int q, double a, double b) {
  if (q == 0) return 1.0;
  const double half = 0.5 * q * (b - a);
  const double sinc = (std::abs(half) < 1e-8) ? 1.0 - half * half / 6.0 : std::sin(half) / half;
  return std::exp(kJ * (q * 0.5 * (a + b))) * sinc;
}

inline cplx pow_j(int m) {
  constexpr cplx table[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  return table[((m % 4) + 4) % 4];
}

}  // namespace detail

/// Closed-form moments of planewave_coeffs over a uniform direction range.
///   R_mn = |A|^2 j^{m-n} <e^{j (n-m) phi}>
///   mu_m = A j^m sum_p j^p J_p(k|c|) e^{-j p phi_c} <e^{j (p-m) phi}>
/// where <.> is the average over the range and the sum over p expands the
/// phase e^{j k.c} of an off-origin expansion center (Jacobi-Anger).
inline FieldPrior prior_from_direction_range(const DirectionRangePrior& p,
                                             const ExpansionConfig& cfg, const Frequency& freq) {
  p.validate();
  const int order = cfg.order;
  const int size = cfg.size();
  const double a = p.angle_min;
  const double b = p.angle_max;
  const double kappa = freq.wavenumber() * cfg.center.norm();
  const double phi_c = cfg.center.angle();

  Eigen::MatrixXcd r(size, size);
  const double power = std::norm(p.amplitude);
  for (int m = -order; m <= order; ++m) {
    for (int n = -order; n <= order; ++n) {
      r(m + order, n + order) = power * detail::pow_j(m - n) * detail::mean_exponential(n - m, a, b);
    }
  }

  const int p_max = (kappa > 0.0) ? static_cast<int>(std::ceil(kappa + 4.0 * std::cbrt(kappa))) + 25 : 0;
  const auto jp = specfun::bessel_j_table(p_max, kappa);
  Eigen::VectorXcd mu(size);
  for (int m = -order; m <= order; ++m) {
    cplx sum = 0.0;
    for (int q = -p_max; q <= p_max; ++q) {
      const int aq = std::abs(q);
      const double jq = (q < 0 && aq % 2 == 1) ? -jp[aq] : jp[aq];
      if (jq == 0.0) continue;
      sum += detail::pow_j(q) * jq * std::exp(-kJ * (q * phi_c)) * detail::mean_exponential(q - m, a, b);
    }
    mu(m + order) = p.amplitude * detail::pow_j(m) * sum;
  }

  Eigen::MatrixXcd sigma = r - mu * mu.adjoint();
  sigma = 0.5 * (sigma + sigma.adjoint()).eval();
  FieldPrior out;
  out.mean = std::move(mu);
  out.covariance = std::move(sigma);
  out.second_moment = out.covariance + out.mean * out.mean.adjoint();
  out.validate();
  return out;
}

/// Moments of an arbitrary linear observation b(phi) of the plane wave with
/// direction phi, by Gauss-Legendre quadrature over the range. Used for
/// pressure matching, where b holds pressures at control points.
inline FieldPrior prior_from_direction_quadrature(
    const DirectionRangePrior& p, const std::function<Eigen::VectorXcd(double)>& observe,
    int nodes) {
  p.validate();
  const auto rule = gauss_legendre(nodes, p.angle_min, p.angle_max);
  Eigen::VectorXcd mu;
  Eigen::MatrixXcd r;
  for (int i = 0; i < nodes; ++i) {
    const Eigen::VectorXcd b = observe(rule.nodes[i]);
    const double w = rule.weights[i] / p.width();
    if (i == 0) {
      mu = Eigen::VectorXcd::Zero(b.size());
      r = Eigen::MatrixXcd::Zero(b.size(), b.size());
    }
    mu += w * b;
    r.noalias() += w * b * b.adjoint();
  }
  Eigen::MatrixXcd sigma = r - mu * mu.adjoint();
  sigma = 0.5 * (sigma + sigma.adjoint()).eval();
  FieldPrior out;
  out.mean = std::move(mu);
  out.covariance = std::move(sigma);
  out.second_moment = out.covariance + out.mean * out.mean.adjoint();
  return out;
}

/// J(S) by the explicit residual operator D = W - W C_S A C_S^H W.
inline double placement_cost(const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& w,
                             const FieldPrior& prior, double lambda, std::span<const int> selected) {
  prior.validate();
  if (!(lambda > 0.0)) throw PreconditionError("placement_cost: lambda must be > 0");
  const auto l = static_cast<Eigen::Index>(selected.size());
  Eigen::MatrixXcd d = w;
  if (l > 0) {
    Eigen::MatrixXcd c_sel(c.rows(), l);
    for (Eigen::Index i = 0; i < l; ++i) c_sel.col(i) = c.col(selected[i]);
    const Eigen::MatrixXcd wc = w * c_sel;
    Eigen::MatrixXcd normal = c_sel.adjoint() * wc;
    normal.diagonal().array() += lambda;
    const Eigen::MatrixXcd a = normal.inverse();
    d -= wc * a * (c_sel.adjoint() * w.adjoint());
  }
  const cplx j = (d * prior.second_moment).trace();
  const double scale = std::abs((w * prior.second_moment).trace());
  if (std::abs(j.imag()) > 1e-9 * std::abs(j.real()) + 1e-12 * scale) {
    throw NumericalError("placement_cost: cost has a non-negligible imaginary part");
  }
  return j.real();
}

/// Per-frequency quantities the greedy search needs, computed once.
struct CostModel {
  Eigen::MatrixXcd gram;    // C^H W C
  Eigen::MatrixXcd weighted_moment;  // C^H W R W C
  double base_cost = 0.0;   // trace(W R) = J(empty)
  double lambda = 0.0;

  Eigen::Index candidates() const { return gram.rows(); }
};

inline CostModel make_cost_model(const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& w,
                                 const FieldPrior& prior, double lambda) {
  if (!(lambda > 0.0)) throw PreconditionError("make_cost_model: lambda must be > 0");
  if (c.rows() != w.rows() || c.rows() != prior.size()) {
    throw PreconditionError("make_cost_model: dimension mismatch between C, W and prior");
  }
  const Eigen::MatrixXcd wc = w * c;
  CostModel m;
  m.gram = c.adjoint() * wc;
  m.gram = 0.5 * (m.gram + m.gram.adjoint()).eval();
  m.weighted_moment = wc.adjoint() * prior.second_moment * wc;
  m.weighted_moment = 0.5 * (m.weighted_moment + m.weighted_moment.adjoint()).eval();
  m.base_cost = std::real((w * prior.second_moment).trace());
  m.lambda = lambda;
  return m;
}

/// Selected candidates and the cached (G_SS + lambda I)^{-1}.
struct SelectionState {
  std::vector<int> selected;
  Eigen::MatrixXcd inverse;  // l x l

  std::size_t size() const { return selected.size(); }
  bool contains(int idx) const {
    return std::find(selected.begin(), selected.end(), idx) != selected.end();
  }
};

/// The bordered update lost positive definiteness (rho below tolerance).
class InverseBreakdown : public NumericalError {
 public:
  explicit InverseBreakdown(const std::string& what) : NumericalError(what) {}
};

inline constexpr double kRhoTolerance = 1e-12;

namespace detail {

inline Eigen::MatrixXcd gather(const Eigen::MatrixXcd& m, std::span<const int> rows,
                               std::span<const int> cols) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  }
  return out;
}

inline void check_index(const CostModel& model, int idx) {
  if (idx < 0 || idx >= model.candidates()) {
    throw PreconditionError("candidate index " + std::to_string(idx) + " out of range");
  }
}

}  // namespace detail

/// (G_SS + lambda I)^{-1} by Cholesky.
inline Eigen::MatrixXcd direct_inverse(const CostModel& model, std::span<const int> selected) {
  for (int idx : selected) detail::check_index(model, idx);
  Eigen::MatrixXcd g = detail::gather(model.gram, selected, selected);
  g.diagonal().array() += model.lambda;
  const auto l = g.rows();
  if (l == 0) return g;
  Eigen::LLT<Eigen::MatrixXcd> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("direct_inverse: Gram matrix not positive definite");
  return llt.solve(Eigen::MatrixXcd::Identity(l, l));
}

/// J(S) = trace(W R) - trace(A Q_SS) from a cached inverse.
inline double cost_from_inverse(const CostModel& model, std::span<const int> selected,
                                const Eigen::MatrixXcd& inverse) {
  if (selected.empty()) return model.base_cost;
  const Eigen::MatrixXcd q = detail::gather(model.weighted_moment, selected, selected);
  return model.base_cost - std::real((inverse * q).trace());
}

inline double cost_from_state(const CostModel& model, const SelectionState& state) {
  return cost_from_inverse(model, state.selected, state.inverse);
}

/// J(S) through a fresh inversion of the selected Gram block.
inline double direct_cost(const CostModel& model, std::span<const int> selected) {
  return cost_from_inverse(model, selected, direct_inverse(model, selected));
}

/// Grow the cached inverse by one candidate with the bordered block formula
///   [A + h h^H / rho, -h / rho; -h^H / rho, 1 / rho].
/// Throws InverseBreakdown when rho <= kRhoTolerance * (G_ii + lambda).
inline SelectionState extend_inverse(const SelectionState& state, const CostModel& model,
                                     int new_index) {
  detail::check_index(model, new_index);
  if (state.contains(new_index)) {
    throw PreconditionError("extend_inverse: candidate " + std::to_string(new_index) + " already selected");
  }
  const auto l = static_cast<Eigen::Index>(state.size());
  const double diag = std::real(model.gram(new_index, new_index)) + model.lambda;
  Eigen::VectorXcd a(l);
  for (Eigen::Index i = 0; i < l; ++i) a(i) = model.gram(state.selected[i], new_index);
  const Eigen::VectorXcd h = state.inverse * a;
  const double rho = diag - std::real(a.dot(h));
  if (!(rho > kRhoTolerance * diag)) {
    throw InverseBreakdown("extend_inverse: rho = " + std::to_string(rho) + " below tolerance");
  }
  SelectionState next;
  next.selected = state.selected;
  next.selected.push_back(new_index);
  next.inverse.resize(l + 1, l + 1);
  next.inverse.topLeftCorner(l, l) = state.inverse + (h * h.adjoint()) / rho;
  next.inverse.topRightCorner(l, 1) = -h / rho;
  next.inverse.bottomLeftCorner(1, l) = -h.adjoint() / rho;
  next.inverse(l, l) = 1.0 / rho;
  return next;
}

/// When to stop adding sources.
struct StopRule {
  int max_sources = 0;
  /// Stop once the best available decrease falls below this fraction of J(empty).
  std::optional<double> min_relative_decrease;
};

struct GreedyResult {
  std::vector<int> order;          // picks in selection order
  std::vector<double> cost_trace;  // J(S^(0)) = J(empty), ..., J(S^(L))
  std::uint64_t inverse_ops = 0;   // complex multiply-adds spent on A-related work
  int reinversions = 0;            // breakdowns recovered by direct inversion
};

/// One frequency bin of a broadband search.
struct WeightedBin {
  const CostModel* model;
  double gamma;
};

namespace detail {

// Cost decrease of every unselected candidate for one bin. Entries of
// `gains` for selected candidates are left untouched.
inline void candidate_gains(const CostModel& model, const SelectionState& state,
                            std::span<const int> unselected, Eigen::VectorXd& gains,
                            std::uint64_t& ops) {
  const auto u = static_cast<Eigen::Index>(unselected.size());
  const auto l = static_cast<Eigen::Index>(state.size());
  gains.resize(u);
  if (l == 0) {
    for (Eigen::Index c = 0; c < u; ++c) {
      const int i = unselected[c];
      gains(c) = std::real(model.weighted_moment(i, i)) / (std::real(model.gram(i, i)) + model.lambda);
    }
    ops += static_cast<std::uint64_t>(u);
    return;
  }
  const Eigen::MatrixXcd g_su = gather(model.gram, state.selected, unselected);
  const Eigen::MatrixXcd q_ss = gather(model.weighted_moment, state.selected, state.selected);
  const Eigen::MatrixXcd q_su = gather(model.weighted_moment, state.selected, unselected);
  const Eigen::MatrixXcd h = state.inverse * g_su;
  const Eigen::MatrixXcd t = q_ss * h;
  ops += static_cast<std::uint64_t>(2 * l * l * u + 3 * l * u);
  for (Eigen::Index c = 0; c < u; ++c) {
    const int i = unselected[c];
    const double diag = std::real(model.gram(i, i)) + model.lambda;
    const double rho = diag - std::real(g_su.col(c).dot(h.col(c)));
    if (!(rho > kRhoTolerance * diag)) {
      std::vector<int> trial = state.selected;
      trial.push_back(i);
      gains(c) = cost_from_state(model, state) - direct_cost(model, trial);
      continue;
    }
    const double quad = std::real(h.col(c).dot(t.col(c)));
    const double cross = std::real(h.col(c).dot(q_su.col(c)));
    gains(c) = (quad - 2.0 * cross + std::real(model.weighted_moment(i, i))) / rho;
  }
}

}  // namespace detail

/// Called after every greedy step with the per-bin selection states.
using GreedyObserver = std::function<void(std::span<const SelectionState>)>;

/// Greedy minimization of the gamma-weighted sum of per-bin costs. Each step
/// adds the candidate with the largest total decrease (lowest index on ties)
/// and updates one cached inverse per bin.
inline GreedyResult greedy_place(std::span<const WeightedBin> bins, const StopRule& stop,
                                 const GreedyObserver& observer = {}) {
  if (bins.empty()) throw PreconditionError("greedy_place: no frequency bins");
  const auto n = bins.front().model->candidates();
  for (const auto& bin : bins) {
    if (bin.model->candidates() != n) throw PreconditionError("greedy_place: inconsistent candidate counts");
    if (!(bin.gamma > 0.0)) throw PreconditionError("greedy_place: weights must be > 0");
  }
  if (n == 0) throw DomainError("greedy_place: empty candidate set");
  if (stop.max_sources < 0 || stop.max_sources > n) {
    throw PreconditionError("greedy_place: max_sources must lie in [0, N]");
  }

  std::vector<SelectionState> states(bins.size());
  GreedyResult result;
  auto total_cost = [&] {
    double j = 0.0;
    for (std::size_t f = 0; f < bins.size(); ++f) j += bins[f].gamma * cost_from_state(*bins[f].model, states[f]);
    return j;
  };
  const double initial = total_cost();
  result.cost_trace.push_back(initial);

  std::vector<int> unselected(static_cast<std::size_t>(n));
  std::iota(unselected.begin(), unselected.end(), 0);
  Eigen::VectorXd gains;
  Eigen::VectorXd total;
  while (static_cast<int>(result.order.size()) < stop.max_sources) {
    total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unselected.size()));
    for (std::size_t f = 0; f < bins.size(); ++f) {
      detail::candidate_gains(*bins[f].model, states[f], unselected, gains, result.inverse_ops);
      total += bins[f].gamma * gains;
    }
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < total.size(); ++c) {
      if (total(c) > total(best)) best = c;
    }
    if (stop.min_relative_decrease && total(best) < *stop.min_relative_decrease * initial) break;

    const int pick = unselected[best];
    for (std::size_t f = 0; f < bins.size(); ++f) {
      const auto l = static_cast<std::uint64_t>(states[f].size());
      try {
        states[f] = extend_inverse(states[f], *bins[f].model, pick);
      } catch (const InverseBreakdown&) {
        std::vector<int> sel = states[f].selected;
        sel.push_back(pick);
        states[f].inverse = direct_inverse(*bins[f].model, sel);
        states[f].selected = std::move(sel);
        ++result.reinversions;
      }
      result.inverse_ops += 2 * l * l + l;
    }
    unselected.erase(unselected.begin() + best);
    result.order.push_back(pick);
    result.cost_trace.push_back(total_cost());
    if (observer) observer(states);
  }
  return result;
}

/// Narrowband greedy search.
inline GreedyResult greedy_place(const CostModel& model, const StopRule& stop,
                                 const GreedyObserver& observer = {}) {
  const WeightedBin bin{&model, 1.0};
  return greedy_place(std::span<const WeightedBin>(&bin, 1), stop, observer);
}

/// J_F(S) = sum_f gamma_f J_f(S), each term by direct inversion.
inline double broadband_cost(std::span<const WeightedBin> bins, std::span<const int> selected) {
  double j = 0.0;
  for (const auto& bin : bins) j += bin.gamma * direct_cost(*bin.model, selected);
  return j;
}

struct ExhaustiveResult {
  std::vector<int> selection;
  double cost = 0.0;
  std::uint64_t subsets = 0;
};

/// Global minimizer of J over all L-subsets (lexicographically first on ties).
/// Intended as an oracle for small instances.
inline ExhaustiveResult exhaustive_place(const CostModel& model, int count,
                                         const std::function<void(std::span<const int>, double)>& visit = {}) {
  const auto n = static_cast<int>(model.candidates());
  if (count < 0 || count > n) throw PreconditionError("exhaustive_place: need 0 <= L <= N");
  double combos = 1.0;
  for (int i = 0; i < count; ++i) combos = combos * (n - i) / (i + 1);
  if (combos > 1e6) throw PreconditionError("exhaustive_place: more than 1e6 subsets");

  std::vector<int> idx(static_cast<std::size_t>(count));
  std::iota(idx.begin(), idx.end(), 0);
  ExhaustiveResult best;
  best.cost = std::numeric_limits<double>::infinity();
  while (true) {
    const double j = direct_cost(model, idx);
    ++best.subsets;
    if (visit) visit(idx, j);
    if (j < best.cost) {
      best.cost = j;
      best.selection = idx;
    }
    int pos = count - 1;
    while (pos >= 0 && idx[pos] == n - count + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int k = pos + 1; k < count; ++k) idx[k] = idx[k - 1] + 1;
  }
  return best;
}

}  // namespace sfsplace
