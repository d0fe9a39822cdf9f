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

// Independent oracles and self-checks, shared by `sfsplace selftest` and the
// test suite.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sfsplace/baselines.hpp"
#include "sfsplace/experiment.hpp"
#include "sfsplace/geometry.hpp"
#include "sfsplace/placement.hpp"
#include "sfsplace/room.hpp"
#include "sfsplace/specfun.hpp"
#include "sfsplace/synthesis.hpp"
#include "sfsplace/wavefield.hpp"

namespace sfsplace::verify {

// ---------------------------------------------------------------------------
// Oracles.

/// J_m(x) by the power series in long double. Accurate for x up to about 20.
inline long double bessel_j_series(int m, long double x) {
  const int n = std::abs(m);
  const long double half = x / 2.0L;
  long double term = 1.0L;
  for (int i = 1; i <= n; ++i) term *= half / i;
  long double sum = term;
  const long double q = -half * half;
  for (int k = 1; k < 400; ++k) {
    term *= q / (static_cast<long double>(k) * (k + n));
    sum += term;
    if (std::fabs(term) < 1e-30L * std::fabs(sum)) break;
  }
  return (m < 0 && n % 2 == 1) ? -sum : sum;
}

/// Number of lattice images with total reflection count <= order, counted
/// by brute force over (nx, qx, ny, qy).
inline int image_count_bruteforce(int order) {
  int count = 0;
  for (int nx = -order - 1; nx <= order + 1; ++nx) {
    for (int qx = 0; qx <= 1; ++qx) {
      for (int ny = -order - 1; ny <= order + 1; ++ny) {
        for (int qy = 0; qy <= 1; ++qy) {
          const int r = std::abs(nx - qx) + std::abs(nx) + std::abs(ny - qy) + std::abs(ny);
          if (r <= order) ++count;
        }
      }
    }
  }
  return count;
}

/// Largest eigenvalue of a Hermitian PSD matrix by power iteration.
inline double power_iteration(const Eigen::MatrixXcd& a, int iterations = 2000) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(a.rows());
  double lambda = 0.0;
  for (int i = 0; i < iterations; ++i) {
    const Eigen::VectorXcd next = a * v;
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    lambda = std::real(v.dot(next)) / v.squaredNorm();
    v = next / norm;
  }
  return lambda;
}

inline Eigen::MatrixXcd random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = {g(rng), g(rng)};
  }
  return m;
}

/// Hermitian square root of a PSD matrix (negative eigenvalues clamped).
inline Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& a) {
  const Eigen::MatrixXcd herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
  const Eigen::VectorXd s = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().adjoint();
}

/// Monte-Carlo mean of the regularized reproduction error
///   F(b) = (C_S d - b)^H W (C_S d - b) + lambda |d|^2,  d = A C_S^H W b,
/// with b complex Gaussian of the prior's mean and covariance.
inline double monte_carlo_cost(const Eigen::MatrixXcd& c, const Eigen::MatrixXcd& w,
                               const FieldPrior& prior, double lambda,
                               std::span<const int> selected, int draws, std::uint64_t seed) {
  const auto l = static_cast<Eigen::Index>(selected.size());
  Eigen::MatrixXcd c_sel(c.rows(), l);
  for (Eigen::Index i = 0; i < l; ++i) c_sel.col(i) = c.col(selected[i]);
  Eigen::MatrixXcd normal = c_sel.adjoint() * w * c_sel;
  normal.diagonal().array() += lambda;
  const Eigen::MatrixXcd solve = normal.ldlt().solve(c_sel.adjoint() * w);
  const Eigen::MatrixXcd root = psd_sqrt(prior.covariance);
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (int s = 0; s < draws; ++s) {
    const Eigen::VectorXcd b = prior.mean + root * random_complex(c.rows(), 1, rng);
    const Eigen::VectorXcd d = solve * b;
    const Eigen::VectorXcd r = c_sel * d - b;
    sum += std::real(r.dot(w * r)) + lambda * d.squaredNorm();
  }
  return sum / draws;
}

// ---------------------------------------------------------------------------
// Checks.

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::string sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

inline bool non_increasing(std::span<const double> trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1] + 1e-12 * std::abs(trace[i - 1])) return false;
  }
  return true;
}

template <typename Body>
CheckResult timed(int id, std::string name, double budget_s, Body&& body) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail += std::string(" exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > budget_s) {
    r.passed = false;
    r.detail += " over time budget " + sci(budget_s) + " s";
  }
  return r;
}

// Random Hermitian positive definite matrix of size n.
inline Eigen::MatrixXcd random_weight(Eigen::Index n, std::mt19937_64& rng) {
  const Eigen::MatrixXcd b = random_complex(n, n, rng);
  Eigen::MatrixXcd w = b * b.adjoint() / static_cast<double>(n);
  w.diagonal().array() += 0.1;
  return 0.5 * (w + w.adjoint());
}

inline FieldPrior random_prior(Eigen::Index n, std::mt19937_64& rng) {
  const Eigen::MatrixXcd k = random_complex(n, n / 2 + 1, rng);
  return FieldPrior::from_moments(random_complex(n, 1, rng).col(0), k * k.adjoint() / static_cast<double>(n));
}

// A free-field toy problem: candidates around a disc of radius 0.5 at the
// origin, plane waves from a random direction range.
struct ToyProblem {
  Eigen::MatrixXcd c;
  Eigen::MatrixXcd w;
  FieldPrior prior;
};

inline ToyProblem random_free_field(int candidates, double hz, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(1.0, 3.0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> width(0.2, 2.0);
  const CircularRegion region{{0.0, 0.0}, 0.5};
  const Frequency freq(hz);
  const auto cfg = ExpansionConfig::for_region(region, freq);
  std::vector<Point2> pos;
  for (int i = 0; i < candidates; ++i) {
    const double r = radius(rng);
    const double a = angle(rng);
    pos.push_back({r * std::cos(a), r * std::sin(a)});
  }
  const double a0 = angle(rng);
  const DirectionRangePrior p{a0, a0 + width(rng), {1.0, 0.0}};
  ToyProblem t;
  t.c = transfer_coeff_matrix(Acoustics(), pos, cfg, freq).matrix;
  t.w = weight_matrix_circle(region, cfg, freq).entries;
  t.prior = prior_from_direction_range(p, cfg, freq);
  return t;
}

}  // namespace detail

/// Criterion 1: incremental inverse against direct inversion.
inline CheckResult check_inverse_equivalence(int instances = 100, std::vector<std::vector<double>>* traces = nullptr) {
  return detail::timed(1, "incremental inverse matches direct inversion", 10.0, [&](CheckResult& r) {
    std::mt19937_64 rng(1001);
    const int n = 30;
    const int rows = 2 * 12 + 1;
    const int l = 10;
    const double lambda = 1e-5;
    double worst_identity = 0.0;
    double worst_cost = 0.0;
    for (int inst = 0; inst < instances; ++inst) {
      const Eigen::MatrixXcd c = random_complex(rows, n, rng);
      const Eigen::MatrixXcd w = detail::random_weight(rows, rng);
      const FieldPrior prior = detail::random_prior(rows, rng);
      const CostModel model = make_cost_model(c, w, prior, lambda);
      double last_incremental = 0.0;
      std::vector<int> last_selection;
      const auto g = greedy_place(model, {l, std::nullopt}, [&](std::span<const SelectionState> states) {
        const auto& s = states.front();
        Eigen::MatrixXcd gram = ::sfsplace::detail::gather(model.gram, s.selected, s.selected);
        gram.diagonal().array() += lambda;
        const auto k = static_cast<Eigen::Index>(s.size());
        const double err = (s.inverse * gram - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff();
        worst_identity = std::max(worst_identity, err);
        last_incremental = cost_from_state(model, s);
        last_selection = s.selected;
      });
      const double direct = placement_cost(c, w, prior, lambda, last_selection);
      worst_cost = std::max(worst_cost, std::abs(last_incremental - direct) / std::abs(direct));
      if (traces) traces->push_back(g.cost_trace);
    }
    r.passed = worst_identity < 1e-8 && worst_cost < 1e-9;
    r.detail = "max |A(G+lambda I)-I| = " + detail::sci(worst_identity) + ", max rel |J_inc-J_dir| = " +
               detail::sci(worst_cost) + " over " + std::to_string(instances) + " instances";
  });
}

/// Criterion 2: greedy against exhaustive search.
inline CheckResult check_greedy_vs_exhaustive(int instances = 50, std::vector<std::vector<double>>* traces = nullptr) {
  return detail::timed(2, "greedy vs exhaustive search", 60.0, [&](CheckResult& r) {
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> hz(200.0, 1500.0);
    const double lambda = 1e-5;
    std::vector<double> ratios;
    int bound_failures = 0;
    int first_pick_failures = 0;
    for (int inst = 0; inst < instances; ++inst) {
      const auto t = detail::random_free_field(12, hz(rng), rng);
      const CostModel model = make_cost_model(t.c, t.w, t.prior, lambda);
      const auto g = greedy_place(model, {3, std::nullopt});
      const auto best = exhaustive_place(model, 3);
      const auto first = exhaustive_place(model, 1);
      const double greedy_cost = direct_cost(model, g.order);
      if (best.cost > greedy_cost + 1e-12 * std::abs(greedy_cost)) ++bound_failures;
      if (first.selection.front() != g.order.front()) ++first_pick_failures;
      ratios.push_back(greedy_cost / best.cost);
      if (traces) traces->push_back(g.cost_trace);
    }
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios.size() % 2 == 1 ? ratios[ratios.size() / 2]
                                                  : 0.5 * (ratios[ratios.size() / 2 - 1] + ratios[ratios.size() / 2]);
    r.passed = bound_failures == 0 && first_pick_failures == 0;
    r.detail = "J_opt > J_greedy in " + std::to_string(bound_failures) + ", first-pick mismatches " +
               std::to_string(first_pick_failures) + ", median J_greedy/J_opt = " + detail::sci(median);
  });
}

/// Criterion 3: expansions against direct evaluation inside the study region.
inline CheckResult check_expansion_fidelity() {
  return detail::timed(3, "expansion fidelity in the target region", 10.0, [&](CheckResult& r) {
    const ExperimentConfig cfg = room_study_config();
    const CircularRegion region = cfg.region();
    const Frequency freq(1000.0);
    const auto ex = ExpansionConfig::for_region(region, freq);
    const auto cands = cfg.candidates.resolve();
    auto pts = region_grid(region, 0.05);
    for (int i = 0; i < 64; ++i) {
      const double a = 2.0 * std::numbers::pi * i / 64.0;
      pts.push_back(region.center + Point2{region.radius * std::cos(a), region.radius * std::sin(a)});
    }
    double free_err = 0.0;
    for (const auto& s : cands) {
      const auto coeffs = pointsource_coeffs(s, ex, freq);
      for (const auto& p : pts) {
        const cplx ref = green2d(p, s, freq);
        free_err = std::max(free_err, std::abs(evaluate_expansion(coeffs, p, freq) - ref) / std::abs(ref));
      }
    }
    const RoomModel room(cfg.room->size_x, cfg.room->size_y, cfg.room->reflection, 3);
    double room_err = 0.0;
    for (std::size_t i = 0; i < cands.size(); i += 10) {
      const auto images = image_sources(room, cands[i]);
      const auto coeffs = room_transfer_coeffs(room, cands[i], ex, freq);
      double peak = 0.0;
      double err = 0.0;
      for (const auto& p : pts) {
        const cplx ref = room_transfer(images, p, freq);
        peak = std::max(peak, std::abs(ref));
        err = std::max(err, std::abs(evaluate_expansion(coeffs, p, freq) - ref));
      }
      room_err = std::max(room_err, err / peak);
    }
    r.passed = free_err < 1e-6 && room_err < 1e-5;
    r.detail = "point source max rel err " + detail::sci(free_err) + " (M = " + std::to_string(ex.order) +
               "), room order-3 max rel err " + detail::sci(room_err);
  });
}

/// Criterion 4: closed-form W against polar quadrature.
inline CheckResult check_weight_matrix() {
  return detail::timed(4, "closed-form W matches quadrature", 30.0, [&](CheckResult& r) {
    const CircularRegion region = room_study_config().region();
    double worst_diag = 0.0;
    double worst_off = 0.0;
    for (int hz = 100; hz <= 2000; hz += 100) {
      const Frequency freq(hz);
      const auto ex = ExpansionConfig::for_region(region, freq);
      const auto closed = weight_matrix_circle(region, ex, freq).entries;
      const auto quad = weight_matrix_quadrature(region, ex, freq).entries;
      const double scale = closed.cwiseAbs().maxCoeff();
      for (int m = 0; m < ex.size(); ++m) {
        for (int n = 0; n < ex.size(); ++n) {
          const double diff = std::abs(closed(m, n) - quad(m, n));
          if (m == n) {
            worst_diag = std::max(worst_diag, diff / std::abs(closed(m, m)));
          } else {
            worst_off = std::max(worst_off, diff / scale);
          }
        }
      }
    }
    r.passed = worst_diag < 1e-6 && worst_off < 1e-6;
    r.detail = "max rel diagonal err " + detail::sci(worst_diag) + ", max off-diagonal / max|W| " +
               detail::sci(worst_off) + ", 100..2000 Hz";
  });
}

/// Criterion 5: J(S) against a Monte-Carlo mean of the reproduction error.
inline CheckResult check_cost_semantics(int draws = 100000) {
  return detail::timed(5, "placement cost matches Monte-Carlo mean error", 60.0, [&](CheckResult& r) {
    std::mt19937_64 rng(5005);
    const auto t = detail::random_free_field(6, 500.0, rng);
    const double lambda = 1e-3;
    double worst = 0.0;
    std::string parts;
    const std::vector<std::vector<int>> selections{{0, 2, 4}, {1}, {0, 1, 2, 3, 4, 5}};
    for (std::size_t i = 0; i < selections.size(); ++i) {
      const double j = placement_cost(t.c, t.w, t.prior, lambda, selections[i]);
      const double mc = monte_carlo_cost(t.c, t.w, t.prior, lambda, selections[i], draws, 77 + i);
      const double rel = std::abs(mc - j) / std::abs(j);
      worst = std::max(worst, rel);
      parts += (i ? ", " : "") + detail::sci(rel);
    }
    r.passed = worst < 0.01;
    r.detail = "rel |J - MC| = " + parts + " (" + std::to_string(draws) + " draws each)";
  });
}

/// Criterion 6: ordering of the reverberant-room study.
struct ReproductionCheck {
  CheckResult result;
  ReproductionResult data;
};

inline ReproductionCheck check_room_study(const std::filesystem::path& out, int threads = 1) {
  ReproductionCheck rc;
  rc.result = detail::timed(6, "reverberant-room study ordering", 900.0, [&](CheckResult& r) {
    ExperimentConfig cfg = room_study_config();
    rc.data = cmd_reproduce_paper(cfg, {out, threads});
    auto mean_of = [&](std::span<const SdrSummary> rows, const std::string& method, double hz) {
      for (const auto& s : rows) {
        if (s.method == method && std::abs(s.frequency_hz - hz) < 1e-9) return s.mean_sdr_db;
      }
      throw std::runtime_error("missing summary row for " + method);
    };
    const auto sweep = summarize(rc.data.angle_sweep);
    const double p = mean_of(sweep, "proposed", 1000.0);
    const double a = mean_of(sweep, "regular_a", 1000.0);
    const double b = mean_of(sweep, "regular_b", 1000.0);
    const bool part_a = p > a && a > b && p - a >= 2.0;

    auto at_zero = [&](const std::string& method) {
      for (const auto& row : rc.data.angle_sweep) {
        if (row.method == method && row.angle_deg == 0.0) return row.sdr_db;
      }
      throw std::runtime_error("missing 0 degree row for " + method);
    };
    const double p0 = at_zero("proposed");
    const double a0 = at_zero("regular_a");
    const double b0 = at_zero("regular_b");
    const bool part_b = p0 > a0 && a0 > b0;

    const auto& bb = rc.data.broadband_mean;
    int bins_below_a = 0;
    std::string worst_bin;
    double low_b = 0.0;
    double high_b = 0.0;
    int low_n = 0;
    int high_n = 0;
    for (double hz : cfg.frequencies) {
      const double pb = mean_of(bb, "proposed_bb", hz);
      const double ab = mean_of(bb, "regular_a", hz);
      const double bv = mean_of(bb, "regular_b", hz);
      if (hz >= 300.0 && pb < ab) {
        ++bins_below_a;
        worst_bin += " " + ::sfsplace::detail::fmt_num(hz) + "Hz(" + detail::sci(pb - ab) + " dB)";
      }
      if (hz < 1000.0) {
        low_b += bv;
        ++low_n;
      } else if (hz > 1000.0) {
        high_b += bv;
        ++high_n;
      }
    }
    const double drop = low_b / low_n - high_b / high_n;
    const bool part_c = bins_below_a == 0 && drop > 6.0;
    r.passed = part_a && part_b && part_c;
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << "(a) mean SDR 1000 Hz P/A/B = " << p << "/" << a << "/" << b << (part_a ? " ok" : " FAIL")
      << "; (b) 0 deg P/A/B = " << p0 << "/" << a0 << "/" << b0 << (part_b ? " ok" : " FAIL")
      << "; (c) BB below A at " << bins_below_a << " bins >= 300 Hz" << worst_bin << ", B drop " << drop << " dB"
      << (part_c ? " ok" : " FAIL");
    r.detail = s.str();
  });
  return rc;
}

/// A small free-field configuration used for CLI and determinism checks.
inline ExperimentConfig toy_config() {
  ExperimentConfig c;
  c.candidates.center = {0.0, 0.0};
  c.candidates.side = 2.0;
  c.candidates.count = 16;
  c.region_center = {0.0, 0.0};
  c.region_radius = 0.3;
  c.frequencies = {400.0, 800.0};
  c.sources = 4;
  for (int a = -30; a <= 30; a += 10) c.evaluation.angles_deg.push_back(a);
  c.evaluation.grid_spacing = 0.02;
  c.evaluation.write_fields = true;
  c.output_dir = "toy";
  c.validate();
  return c;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Criterion 7: monotone cost traces and byte-identical artifacts.
inline CheckResult check_monotone_deterministic(const std::filesystem::path& scratch,
                                                std::span<const std::vector<double>> extra_traces = {},
                                                int threads = 4) {
  return detail::timed(7, "monotone cost traces and deterministic artifacts", 300.0, [&](CheckResult& r) {
    int traces = 0;
    int bad_traces = 0;
    for (const auto& t : extra_traces) {
      ++traces;
      if (!detail::non_increasing(t)) ++bad_traces;
    }
    std::vector<std::filesystem::path> dirs;
    for (int run = 0; run < 3; ++run) {
      ExperimentConfig cfg = toy_config();
      cfg.broadband = (run == 2);
      // Runs 0 and 1 are identical multi-threaded runs; run 2 is single-threaded broadband.
      if (run == 2) cfg.room = RoomConfig{4.0, 3.0, {0.7, 0.7, 0.7, 0.7}, 4};
      const auto dir = scratch / ("run" + std::to_string(run));
      std::filesystem::remove_all(dir);
      const RunOptions opt{dir, run == 2 ? 1 : threads};
      const auto placed = cmd_place(cfg, opt);
      for (const auto& p : placed) {
        ++traces;
        if (!detail::non_increasing(p.cost_trace)) ++bad_traces;
      }
      cmd_evaluate(cfg, placed, opt);
      dirs.push_back(dir);
    }
    int compared = 0;
    int differing = 0;
    for (const auto& e : std::filesystem::directory_iterator(dirs[0])) {
      ++compared;
      if (read_file(e.path()) != read_file(dirs[1] / e.path().filename())) ++differing;
    }
    // Thread count must not change results either.
    ExperimentConfig cfg = toy_config();
    const auto single = scratch / "single";
    std::filesystem::remove_all(single);
    cmd_evaluate(cfg, cmd_place(cfg, {single, 1}), {single, 1});
    for (const auto& e : std::filesystem::directory_iterator(dirs[0])) {
      ++compared;
      if (read_file(e.path()) != read_file(single / e.path().filename())) ++differing;
    }
    r.passed = bad_traces == 0 && differing == 0 && compared > 0;
    r.detail = std::to_string(traces - bad_traces) + "/" + std::to_string(traces) +
               " traces non-increasing, " + std::to_string(compared - differing) + "/" + std::to_string(compared) +
               " artifact comparisons identical";
  });
}

/// Criterion 8: Wronskian and three-term recurrences.
inline CheckResult check_special_functions(int samples = 1000) {
  return detail::timed(8, "Bessel identities", 5.0, [&](CheckResult& r) {
    std::mt19937_64 rng(8008);
    std::uniform_int_distribution<int> order(0, 40);
    std::uniform_real_distribution<double> logx(std::log(0.5), std::log(100.0));
    double wronskian = 0.0;
    double rec_j = 0.0;
    double rec_y = 0.0;
    for (int s = 0; s < samples; ++s) {
      const int m = order(rng);
      const double x = std::exp(logx(rng));
      const auto j = specfun::bessel_j_table(m + 1, x);
      const auto y = specfun::bessel_y_table(m + 1, x);
      const double expected = 2.0 / (std::numbers::pi * x);
      const double w = j[m + 1] * y[m] - j[m] * y[m + 1];
      wronskian = std::max(wronskian, std::abs(w - expected) / expected);
      const double jm1 = m == 0 ? -j[1] : j[m - 1];
      const double ym1 = m == 0 ? -y[1] : y[m - 1];
      const double tj = 2.0 * m / x * j[m];
      const double ty = 2.0 * m / x * y[m];
      const double sj = std::max({std::abs(jm1), std::abs(j[m + 1]), std::abs(tj)});
      const double sy = std::max({std::abs(ym1), std::abs(y[m + 1]), std::abs(ty)});
      rec_j = std::max(rec_j, std::abs(jm1 + j[m + 1] - tj) / sj);
      rec_y = std::max(rec_y, std::abs(ym1 + y[m + 1] - ty) / sy);
    }
    r.passed = wronskian < 1e-8 && rec_j < 1e-8 && rec_y < 1e-8;
    r.detail = "max rel Wronskian err " + detail::sci(wronskian) + ", J recurrence " + detail::sci(rec_j) +
               ", Y recurrence " + detail::sci(rec_y) + " over " + std::to_string(samples) + " samples";
  });
}

}  // namespace sfsplace::verify
