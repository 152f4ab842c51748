#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwsearch/quadrature.hpp"

namespace qwsearch {

// The singular integrals behind the normalisation constant:
//   I_i(n) = 2^{i-1} Int_{[pi/2n, pi/2]^i}  dy / sum_l sin^2(y_l),
// and their n -> infinity limits (lower bound 0), which converge for i >= 3
// and diverge for i in {1, 2}.

inline constexpr int kMaxIntegralOrder = 6;
inline constexpr double kCatalan = 0.9159655941772190150546035149324;

struct IntegralValue {
  double value = 0.0;
  double error = 0.0;
  long long evaluations = 0;
  bool converged = false;
};

namespace detail {

inline void require_integral_order(int i) {
  if (i < 1 || i > kMaxIntegralOrder)
    throw std::invalid_argument("integral order must be in [1, " + std::to_string(kMaxIntegralOrder) + "]");
}

inline QuadratureOptions default_integral_options(int i) {
  QuadratureOptions opt;
  if (i <= 3) {
    opt.abs_tol = 1e-8;
    opt.max_evaluations = 60'000'000;
  } else if (i == 4) {
    opt.abs_tol = 1e-6;
    opt.max_evaluations = 60'000'000;
  } else {
    opt.abs_tol = 1e-4;
    opt.max_evaluations = 120'000'000;
  }
  return opt;
}

// Exclusion radius for the origin singularity of the asymptotic integrals.
// With sin y >= (2/pi) y on [0, pi/2] the integrand is bounded by
// (pi^2/4)/r^2, so the mass of the removed spherical sector of radius rho is
// at most 2^{i-1} (pi^2/4) Omega_i rho^{i-2}/(i-2), with Omega_i the solid
// angle of the positive orthant. rho is chosen so this budget is 1e-7.
inline double sector_budget_constant(int i) {
  const double sphere_area = 2.0 * std::pow(std::numbers::pi, i / 2.0) / std::tgamma(i / 2.0);
  const double orthant = sphere_area / static_cast<double>(1LL << i);
  return std::pow(2.0, i - 1) * (std::numbers::pi * std::numbers::pi / 4.0) * orthant / (i - 2);
}

inline double sector_exclusion_radius(int i, double budget) {
  return std::pow(budget / sector_budget_constant(i), 1.0 / (i - 2));
}

}  // namespace detail

// Finite-n integral over [pi/2n, pi/2]^i.
inline IntegralValue I_quadrature(int i, int n, QuadratureOptions opt) {
  detail::require_integral_order(i);
  if (n < 2) throw std::invalid_argument("side length must be >= 2");
  const double lo = std::numbers::pi / (2.0 * n);
  const double hi = std::numbers::pi / 2.0;
  const double scale = std::pow(2.0, i - 1);
  QuadratureResult q;
  if (i == 1) {
    q = integrate_gk15([](double y) { double s = std::sin(y); return 1.0 / (s * s); }, lo, hi, opt);
  } else {
    std::vector<double> lower(static_cast<std::size_t>(i), lo);
    std::vector<double> upper(static_cast<std::size_t>(i), hi);
    auto f = [](std::span<const double> y) {
      double denom = 0.0;
      for (double v : y) {
        const double s = std::sin(v);
        denom += s * s;
      }
      return 1.0 / denom;
    };
    q = integrate_genz_malik(f, lower, upper, opt);
  }
  return {scale * q.value, scale * q.error, q.evaluations, q.converged};
}

inline IntegralValue I_quadrature(int i, int n) { return I_quadrature(i, n, detail::default_integral_options(i)); }

// n -> infinity limit: lower bound 0, integrable origin singularity for
// i >= 3 handled by excluding a small spherical sector and charging its
// analytic bound to the error budget.
inline IntegralValue I_quadrature_asymptotic(int i, QuadratureOptions opt) {
  detail::require_integral_order(i);
  if (i <= 2) throw std::invalid_argument("divergent limit: I_1 and I_2 have no finite n -> infinity value");
  const double budget = 1e-7;
  const double rho = detail::sector_exclusion_radius(i, budget);
  const double rho2 = rho * rho;
  const double hi = std::numbers::pi / 2.0;
  const double scale = std::pow(2.0, i - 1);
  std::vector<double> lower(static_cast<std::size_t>(i), 0.0);
  std::vector<double> upper(static_cast<std::size_t>(i), hi);
  auto f = [rho2](std::span<const double> y) {
    double r2 = 0.0;
    double denom = 0.0;
    for (double v : y) {
      r2 += v * v;
      const double s = std::sin(v);
      denom += s * s;
    }
    if (r2 < rho2) return 0.0;
    return 1.0 / denom;
  };
  QuadratureResult q = integrate_genz_malik(f, lower, upper, opt);
  return {scale * q.value, scale * q.error + budget, q.evaluations, q.converged};
}

inline IntegralValue I_quadrature_asymptotic(int i) {
  return I_quadrature_asymptotic(i, detail::default_integral_options(i));
}

// Closed form of the first integral: cot(pi/2n) = 2n/pi + O(1/n).
inline double I1_closed_form(int n) { return 1.0 / std::tan(std::numbers::pi / (2.0 * n)); }

// Large-n expansion of the second integral (error O(1/n^2)):
//   I_2(n) = pi ln n + pi ln(4/pi) - 2K - (pi/2) ln 2.
inline double I2_asymptotic(int n) {
  const double pi = std::numbers::pi;
  return pi * std::log(static_cast<double>(n)) + pi * std::log(4.0 / pi) - 2.0 * kCatalan -
         0.5 * pi * std::log(2.0);
}

}  // namespace qwsearch
