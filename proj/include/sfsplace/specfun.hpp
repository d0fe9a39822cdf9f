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

// Integer-order cylindrical Bessel functions of real argument.
//
// J_n is computed by one of three routes depending on (n, x):
//   x <= 1             ascending power series, one series per order
//   x >= 25, n <= x    Hankel asymptotic J_0, J_1 followed by upward recurrence
//   otherwise          Miller's downward recurrence normalised with
//                      J_0 + 2 sum J_2k = 1
// Y_n always uses upward recurrence (stable for the dominant solution), seeded
// with Y_0, Y_1 from the Hankel asymptotic expansion for x >= 25 and from the
// Neumann series in J_k otherwise.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "sfsplace/error.hpp"

namespace sfsplace::specfun {

namespace detail {

inline constexpr double kAsymptoticThreshold = 25.0;
inline constexpr double kSeriesThreshold = 1.0;
inline constexpr double kRescaleLimit = 1e250;

inline void require_finite_nonneg(double x, const char* fn) {
  if (!std::isfinite(x) || x < 0.0) {
    throw DomainError(std::string(fn) + ": argument must be finite and >= 0, got " +
                      std::to_string(x));
  }
}

inline void require_positive(double x, const char* fn) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " +
                      std::to_string(x));
  }
}

inline double reflection_sign(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

struct JYPair {
  double j;
  double y;
};

// Hankel's asymptotic expansion for orders 0 and 1. Terms are summed until
// they stop decreasing or fall below double resolution.
inline JYPair hankel_asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double prev_abs = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double abs_term = std::abs(term);
    if (abs_term > prev_abs) break;
    // k = 1, 2, 3, 4 ... contribute +Q, -P, -Q, +P, ...
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      case 0: p += term; break;
    }
    if (abs_term < 1e-17) break;
    prev_abs = abs_term;
  }
  const double c = std::cos(x);
  const double s = std::sin(x);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  double cos_chi = 0.0;
  double sin_chi = 0.0;
  if (nu == 0) {  // chi = x - pi/4
    cos_chi = (c + s) * inv_sqrt2;
    sin_chi = (s - c) * inv_sqrt2;
  } else {  // chi = x - 3pi/4
    cos_chi = (s - c) * inv_sqrt2;
    sin_chi = -(s + c) * inv_sqrt2;
  }
  const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
  return {amp * (p * cos_chi - q * sin_chi), amp * (p * sin_chi + q * cos_chi)};
}

// Ascending series J_n(x) = (x/2)^n sum_k (-x^2/4)^k / (k! (n+k)!).
inline double series_j(int n, double x) {
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const double half = 0.5 * x;
  const double log_prefactor = n * std::log(half) - std::lgamma(n + 1.0);
  if (log_prefactor < -745.0) return 0.0;
  const double z = -half * half;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= z / (k * static_cast<double>(n + k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::exp(log_prefactor) * sum;
}

// Start order for Miller's recurrence: far enough past the turning point
// (n ~ x, width ~ x^{1/3}) that the neglected J_start is below 1e-17.
inline int miller_start(int n_max, double x) {
  const double base = std::max(static_cast<double>(n_max), x);
  int start = static_cast<int>(std::ceil(base + 30.0 + 15.0 * std::cbrt(x)));
  if (start % 2 != 0) ++start;
  return start;
}

// Normalised J_0..J_start by downward recurrence. x > 0.
inline std::vector<double> miller_j(int n_max, double x) {
  const int start = miller_start(n_max, x);
  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1.0;
  const double two_over_x = 2.0 / x;
  for (int n = start; n >= 1; --n) {
    j[n - 1] = n * two_over_x * j[n] - j[n + 1];
    if (std::abs(j[n - 1]) > kRescaleLimit) {
      for (int k = n - 1; k <= start; ++k) j[k] /= kRescaleLimit;
    }
  }
  double norm = j[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * j[k];
  for (double& v : j) v /= norm;
  j.pop_back();
  return j;
}

// Y_0 and Y_1 from the Neumann series over the normalised Miller table:
//   Y_0 = (2/pi)(ln(x/2)+gamma) J_0 - (4/pi) sum_k (-1)^k J_2k / k
//   Y_1 = -(2/(pi x)) J_0 + (2/pi)(ln(x/2)+gamma-1) J_1
//         - (2/pi) sum_k (-1)^k (2k+1) J_{2k+1} / (k(k+1))
inline JYPair neumann_y01(const std::vector<double>& j, double x, double* y1) {
  const double pi = std::numbers::pi;
  const double log_term = std::log(0.5 * x) + std::numbers::egamma;
  double s0 = 0.0;
  double s1 = 0.0;
  const int top = static_cast<int>(j.size()) - 1;
  for (int k = 1; 2 * k + 1 <= top; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s0 += sign * j[2 * k] / k;
    s1 += sign * (2.0 * k + 1.0) * j[2 * k + 1] / (k * (k + 1.0));
  }
  const double y0 = (2.0 / pi) * log_term * j[0] - (4.0 / pi) * s0;
  *y1 = -(2.0 / (pi * x)) * j[0] + (2.0 / pi) * (log_term - 1.0) * j[1] - (2.0 / pi) * s1;
  return {j[0], y0};
}

}  // namespace detail

/// J_0(x) .. J_{n_max}(x) for x >= 0.
inline std::vector<double> bessel_j_table(int n_max, double x) {
  detail::require_finite_nonneg(x, "bessel_j");
  if (n_max < 0) throw DomainError("bessel_j_table: n_max must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (x <= detail::kSeriesThreshold) {
    for (int n = 0; n <= n_max; ++n) out[n] = detail::series_j(n, x);
    return out;
  }
  if (x >= detail::kAsymptoticThreshold && n_max <= x) {
    out[0] = detail::hankel_asymptotic(0, x).j;
    if (n_max >= 1) out[1] = detail::hankel_asymptotic(1, x).j;
    for (int n = 1; n < n_max; ++n) out[n + 1] = (2.0 * n / x) * out[n] - out[n - 1];
    return out;
  }
  const auto full = detail::miller_j(n_max, x);
  std::copy_n(full.begin(), out.size(), out.begin());
  return out;
}

/// Y_0(x) .. Y_{n_max}(x) for x > 0. Orders whose value exceeds the double
/// range come back as -inf.
inline std::vector<double> bessel_y_table(int n_max, double x) {
  detail::require_positive(x, "bessel_y");
  if (n_max < 0) throw DomainError("bessel_y_table: n_max must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  double y0 = 0.0;
  double y1 = 0.0;
  if (x >= detail::kAsymptoticThreshold) {
    y0 = detail::hankel_asymptotic(0, x).y;
    y1 = detail::hankel_asymptotic(1, x).y;
  } else {
    const auto j = detail::miller_j(1, x);
    y0 = detail::neumann_y01(j, x, &y1).y;
  }
  out[0] = y0;
  if (n_max >= 1) out[1] = y1;
  for (int n = 1; n < n_max; ++n) out[n + 1] = (2.0 * n / x) * out[n] - out[n - 1];
  return out;
}

/// H^(1)_0(x) .. H^(1)_{n_max}(x) = J_n(x) + j Y_n(x) for x > 0.
inline std::vector<std::complex<double>> hankel1_table(int n_max, double x) {
  detail::require_positive(x, "hankel1");
  if (n_max < 0) throw DomainError("hankel1_table: n_max must be >= 0");
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n_max) + 1);
  if (x >= detail::kAsymptoticThreshold) {
    const auto p0 = detail::hankel_asymptotic(0, x);
    const auto p1 = detail::hankel_asymptotic(1, x);
    out[0] = {p0.j, p0.y};
    if (n_max >= 1) out[1] = {p1.j, p1.y};
    if (n_max <= x) {
      for (int n = 1; n < n_max; ++n) out[n + 1] = (2.0 * n / x) * out[n] - out[n - 1];
      return out;
    }
    const auto j = detail::miller_j(n_max, x);
    double y_prev = p0.y;
    double y_cur = p1.y;
    for (int n = 0; n <= n_max; ++n) {
      if (n >= 2) {
        const double y_next = (2.0 * (n - 1) / x) * y_cur - y_prev;
        y_prev = y_cur;
        y_cur = y_next;
      }
      out[n] = {j[n], n == 0 ? p0.y : y_cur};
    }
    return out;
  }
  // One Miller table serves J_n and the Neumann series for Y_0, Y_1.
  const auto j = detail::miller_j(n_max, x);
  double y1 = 0.0;
  const double y0 = detail::neumann_y01(j, x, &y1).y;
  std::vector<double> y(out.size());
  y[0] = y0;
  if (n_max >= 1) y[1] = y1;
  for (int n = 1; n < n_max; ++n) y[n + 1] = (2.0 * n / x) * y[n] - y[n - 1];
  const bool use_series = x <= detail::kSeriesThreshold;
  for (int n = 0; n <= n_max; ++n) {
    out[n] = {use_series ? detail::series_j(n, x) : j[n], y[n]};
  }
  return out;
}

/// H^(1)_0(x) without building tables; the hot path of Green's function
/// evaluation.
inline std::complex<double> hankel1_0(double x) {
  detail::require_positive(x, "hankel1");
  if (x >= detail::kAsymptoticThreshold) {
    const auto p = detail::hankel_asymptotic(0, x);
    return {p.j, p.y};
  }
  // Same recurrence and Neumann sum as miller_j / neumann_y01, on the stack.
  constexpr int kCap = 160;
  const int start = std::min(detail::miller_start(1, x), kCap - 2);
  std::array<double, kCap> j{};
  j[start] = 1.0;
  const double two_over_x = 2.0 / x;
  for (int n = start; n >= 1; --n) {
    j[n - 1] = n * two_over_x * j[n] - j[n + 1];
    if (std::abs(j[n - 1]) > detail::kRescaleLimit) {
      for (int k = n - 1; k <= start; ++k) j[k] /= detail::kRescaleLimit;
    }
  }
  double norm = j[0];
  double s0 = 0.0;
  for (int k = 1; 2 * k <= start; ++k) {
    norm += 2.0 * j[2 * k];
    s0 += ((k % 2 == 0) ? 1.0 : -1.0) * j[2 * k] / k;
  }
  const double j0 = j[0] / norm;
  const double pi = std::numbers::pi;
  const double y0 = (2.0 / pi) * (std::log(0.5 * x) + std::numbers::egamma) * j0 - (4.0 / pi) * s0 / norm;
  return {x <= detail::kSeriesThreshold ? detail::series_j(0, x) : j0, y0};
}

/// J_m(x) for any integer order; J_{-m} = (-1)^m J_m.
inline double bessel_j(int m, double x) {
  const int n = std::abs(m);
  if (x <= detail::kSeriesThreshold) {
    detail::require_finite_nonneg(x, "bessel_j");
    const double v = detail::series_j(n, x);
    return m < 0 ? detail::reflection_sign(n) * v : v;
  }
  const double v = bessel_j_table(n, x)[n];
  return m < 0 ? detail::reflection_sign(n) * v : v;
}

/// Y_m(x) for any integer order and x > 0; Y_{-m} = (-1)^m Y_m.
inline double bessel_y(int m, double x) {
  const int n = std::abs(m);
  const double v = bessel_y_table(n, x)[n];
  return m < 0 ? detail::reflection_sign(n) * v : v;
}

/// H^(1)_m(x) = J_m(x) + j Y_m(x).
inline std::complex<double> hankel1(int m, double x) {
  const int n = std::abs(m);
  const auto v = hankel1_table(n, x)[n];
  return m < 0 ? detail::reflection_sign(n) * v : v;
}

}  // namespace sfsplace::specfun
