#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwsearch/integrals.hpp"
#include "qwsearch/kahan.hpp"
#include "qwsearch/modes.hpp"

namespace qwsearch {

// The localised approximate eigenvector nu_1 of the search walk U1 and its
// normalisation constant b, computed by three independent routes:
//  - exact lattice sum      1/b^2 = (2d/N) sum_{k != 0} 1/(d - sum_i cos(2 pi k_i/n))
//  - asymptotic closed forms (d = 2 log law, d = 3 constant, d >= 4 induction)
//  - direct quadrature of the I_i integrals.
// b is both the normalisation of nu_1 and its overlap with the marked
// vertex: <sv|nu_1> = b (1 - 1/N), so b^2 lower-bounds the localisation
// probability.

inline constexpr long long kMaxExactSumTerms = 1LL << 31;

namespace detail {

inline void require_sum_size(int d, int n) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (n < 2) throw std::invalid_argument("side length must be >= 2");
  long long count = 1;
  for (int i = 0; i < d; ++i) {
    count *= n;
    if (count > kMaxExactSumTerms)
      throw std::length_error("exact sum over n^d = " + std::to_string(n) + "^" + std::to_string(d) +
                              " modes is too large");
  }
}

inline std::vector<double> cos_table(int n) {
  std::vector<double> table(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) table[static_cast<std::size_t>(r)] = std::cos(2.0 * std::numbers::pi * r / n);
  return table;
}

inline double binomial(int n, int k) {
  double result = 1.0;
  for (int j = 1; j <= k; ++j) result = result * (n - k + j) / j;
  return result;
}

}  // namespace detail

enum class NormMethod { exact_sum, asymptotic, quadrature };

inline const char* to_string(NormMethod method) {
  switch (method) {
    case NormMethod::exact_sum: return "exact-sum";
    case NormMethod::asymptotic: return "asymptotic";
    case NormMethod::quadrature: return "quadrature";
  }
  return "unknown";
}

struct NormTerm {
  int i = 0;            // number of non-zero mode components in this class
  double binomial = 0;  // C(d, i), the number of such classes
  double I_value = 0;   // implied or supplied I_i
  double term = 0;      // contribution to 1/b^2
};

struct NormResult {
  double inv_b2 = 0.0;
  NormMethod method = NormMethod::exact_sum;
  std::vector<NormTerm> breakdown;
  double quadrature_error = 0.0;  // only meaningful for the quadrature method
};

inline double b_from(const NormResult& norm) { return 1.0 / std::sqrt(norm.inv_b2); }

// One regrouping class of the exact sum: all modes with exactly the first i
// components non-zero, i.e. sum over j in [1, n-1]^i of 1/(i - sum cos).
inline double regrouped_class_sum(int i, int n) {
  const std::vector<double> cos = detail::cos_table(n);
  std::vector<int> j(static_cast<std::size_t>(i), 1);
  KahanAccumulator<double> acc;
  while (true) {
    double cos_sum = 0.0;
    for (int l = 0; l < i; ++l) cos_sum += cos[static_cast<std::size_t>(j[static_cast<std::size_t>(l)])];
    acc.add(1.0 / (i - cos_sum));
    int axis = i - 1;
    while (axis >= 0 && ++j[static_cast<std::size_t>(axis)] == n) {
      j[static_cast<std::size_t>(axis)] = 1;
      --axis;
    }
    if (axis < 0) break;
  }
  return acc.value();
}

// Exact 1/b^2 by direct compensated summation over all k != 0; the
// breakdown regroups the same sum by edges, faces, cubes, ... (i non-zero
// components, with multiplicity C(d, i)). Both routes agree to roundoff.
inline NormResult inv_b2_exact(int d, int n) {
  detail::require_sum_size(d, n);
  const std::vector<double> cos = detail::cos_table(n);
  long long N = 1;
  for (int i = 0; i < d; ++i) N *= n;

  KahanAccumulator<double> acc;
  std::vector<int> k(static_cast<std::size_t>(d), 0);
  for (long long flat = 1; flat < N; ++flat) {
    int axis = d - 1;
    while (++k[static_cast<std::size_t>(axis)] == n) {
      k[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    double cos_sum = 0.0;
    for (int i = 0; i < d; ++i) cos_sum += cos[static_cast<std::size_t>(k[static_cast<std::size_t>(i)])];
    acc.add(1.0 / (d - cos_sum));
  }

  NormResult result;
  result.method = NormMethod::exact_sum;
  const double prefactor = 2.0 * d / static_cast<double>(N);
  result.inv_b2 = prefactor * acc.value();
  for (int i = 1; i <= d; ++i) {
    NormTerm term;
    term.i = i;
    term.binomial = detail::binomial(d, i);
    const double class_sum = regrouped_class_sum(i, n);
    term.term = prefactor * term.binomial * class_sum;
    term.I_value = std::pow(std::numbers::pi / n, i) * class_sum;  // implied I_i of this class
    result.breakdown.push_back(term);
  }
  return result;
}

// The regrouped total alone (edges + faces + ...), for cross-checking the
// direct sum.
inline double inv_b2_exact_regrouped(int d, int n) {
  detail::require_sum_size(d, n);
  long long N = 1;
  for (int i = 0; i < d; ++i) N *= n;
  KahanAccumulator<double> acc;
  for (int i = 1; i <= d; ++i) acc.add(detail::binomial(d, i) * regrouped_class_sum(i, n));
  return 2.0 * d / static_cast<double>(N) * acc.value();
}

namespace detail {

// Cache for the asymptotic I_i values; they are expensive cubatures and
// deterministic, so computing each order once per process is enough.
inline const IntegralValue& cached_asymptotic_I(int i) {
  static std::mutex mutex;
  static std::array<IntegralValue, kMaxIntegralOrder + 1> cache{};
  static std::array<bool, kMaxIntegralOrder + 1> filled{};
  std::lock_guard<std::mutex> lock(mutex);
  if (!filled[static_cast<std::size_t>(i)]) {
    cache[static_cast<std::size_t>(i)] = I_quadrature_asymptotic(i);
    filled[static_cast<std::size_t>(i)] = true;
  }
  return cache[static_cast<std::size_t>(i)];
}

}  // namespace detail

// Leading-order closed forms for 1/b^2:
//   d = 2: (2/pi) ln N + (8/pi^2)(2 - K) + (2/pi) ln(8/pi^2)
//   d = 3: (6/pi^3) I_3  with I_3 from the asymptotic quadrature
//   d >= 4: (2d/pi^d) I_d plus the binomially weighted lower-order classes
//           with their n^{i-d} prefactors (they vanish as n grows).
inline NormResult inv_b2_asymptotic(int d, int n) {
  if (d < 2) throw std::invalid_argument("asymptotic normalisation requires d >= 2");
  if (n < 2) throw std::invalid_argument("side length must be >= 2");
  const double pi = std::numbers::pi;
  NormResult result;
  result.method = NormMethod::asymptotic;

  if (d == 2) {
    const double N = static_cast<double>(n) * n;
    NormTerm edge{1, 2.0, 2.0 * n / pi, 16.0 / (pi * pi)};
    NormTerm face{2, 1.0, I2_asymptotic(n), (4.0 / N) * std::pow(n / pi, 2) * I2_asymptotic(n)};
    result.breakdown = {edge, face};
    result.inv_b2 = (2.0 / pi) * std::log(N) + (8.0 / (pi * pi)) * (2.0 - kCatalan) +
                    (2.0 / pi) * std::log(8.0 / (pi * pi));
    return result;
  }

  if (d == 3) {
    const IntegralValue& I3 = detail::cached_asymptotic_I(3);
    NormTerm body{3, 1.0, I3.value, 6.0 / std::pow(pi, 3) * I3.value};
    result.breakdown = {body};
    result.inv_b2 = body.term;
    result.quadrature_error = 6.0 / std::pow(pi, 3) * I3.error;
    return result;
  }

  if (d > kMaxIntegralOrder)
    throw std::invalid_argument("asymptotic normalisation supports d <= " + std::to_string(kMaxIntegralOrder));
  KahanAccumulator<double> total;
  KahanAccumulator<double> err;
  for (int i = 1; i <= d; ++i) {
    NormTerm term;
    term.i = i;
    term.binomial = detail::binomial(d, i);
    double I_err = 0.0;
    if (i == 1) {
      term.I_value = I1_closed_form(n);
    } else if (i == 2) {
      term.I_value = I2_asymptotic(n);
    } else {
      const IntegralValue& I = detail::cached_asymptotic_I(i);
      term.I_value = I.value;
      I_err = I.error;
    }
    const double prefactor = 2.0 * d * term.binomial * std::pow(static_cast<double>(n), i - d) / std::pow(pi, i);
    term.term = prefactor * term.I_value;
    err.add(std::abs(prefactor) * I_err);
    total.add(term.term);
    result.breakdown.push_back(term);
  }
  result.inv_b2 = total.value();
  result.quadrature_error = err.value();
  return result;
}

// 1/b^2 assembled from quadrature of the I_i integrals. With n > 0 every
// class is integrated over [pi/2n, pi/2]^i; with n == 0 the n -> infinity
// limit is returned (d >= 3 only, the lower classes vanish).
inline NormResult inv_b2_quadrature(int d, int n) {
  if (d < 2) throw std::invalid_argument("quadrature normalisation requires d >= 2");
  const double pi = std::numbers::pi;
  NormResult result;
  result.method = NormMethod::quadrature;
  if (n <= 0) {
    if (d < 3) throw std::invalid_argument("the n -> infinity limit diverges for d = 2; pass a side length");
    if (d > kMaxIntegralOrder)
      throw std::invalid_argument("quadrature supports d <= " + std::to_string(kMaxIntegralOrder));
    const IntegralValue& I = detail::cached_asymptotic_I(d);
    const double prefactor = 2.0 * d / std::pow(pi, d);
    result.breakdown = {{d, 1.0, I.value, prefactor * I.value}};
    result.inv_b2 = prefactor * I.value;
    result.quadrature_error = prefactor * I.error;
    return result;
  }
  if (d > kMaxIntegralOrder)
    throw std::invalid_argument("quadrature supports d <= " + std::to_string(kMaxIntegralOrder));
  double N = std::pow(static_cast<double>(n), d);
  KahanAccumulator<double> total, err;
  for (int i = 1; i <= d; ++i) {
    NormTerm term;
    term.i = i;
    term.binomial = detail::binomial(d, i);
    const IntegralValue I = I_quadrature(i, n);
    term.I_value = I.value;
    const double prefactor = 2.0 * d / N * term.binomial * std::pow(n / pi, i);
    term.term = prefactor * term.I_value;
    total.add(term.term);
    err.add(prefactor * I.error);
    result.breakdown.push_back(term);
  }
  result.inv_b2 = total.value();
  result.quadrature_error = err.value();
  return result;
}

inline NormResult compute_norm(int d, int n, NormMethod method) {
  switch (method) {
    case NormMethod::exact_sum: return inv_b2_exact(d, n);
    case NormMethod::asymptotic: return inv_b2_asymptotic(d, n);
    case NormMethod::quadrature: return inv_b2_quadrature(d, n);
  }
  throw std::invalid_argument("unknown normalisation method");
}

// The lambda = 1 solvability sum; each conjugate pair contributes exactly
// -1, so the value is 1 - 1/N. The numerical evaluation doubles as a check
// of the eigenphase layout.
inline double consistency_sum(int d, int n) {
  detail::require_sum_size(d, n);
  const std::vector<double> cos = detail::cos_table(n);
  long long N = 1;
  for (int i = 0; i < d; ++i) N *= n;
  KahanAccumulator<double> acc;
  std::vector<int> k(static_cast<std::size_t>(d), 0);
  for (long long flat = 1; flat < N; ++flat) {
    int axis = d - 1;
    while (++k[static_cast<std::size_t>(axis)] == n) {
      k[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    double mean = 0.0;
    for (int i = 0; i < d; ++i) mean += cos[static_cast<std::size_t>(k[static_cast<std::size_t>(i)])];
    mean /= d;
    if (mean > 1.0) mean = 1.0;
    if (mean < -1.0) mean = -1.0;
    const double theta = std::acos(mean);
    const Complex z = std::polar(1.0, theta);
    const Complex bracket = z / (1.0 - z) + std::conj(z) / (1.0 - std::conj(z));
    acc.add(bracket.real());
  }
  return -acc.value() / static_cast<double>(N);
}

// The localised state at lambda = 1 (where the crossing sits and the
// approximate eigenvalue is 1): coefficients over the phi_k^+- basis,
//   a_k^+- = b * (-2) alpha^{-k.v} e^{+-i theta_k} / (sqrt(2N) (1 - e^{+-i theta_k})),
// normalised to 1 and orthogonal to phi_0 by construction. The global phase
// makes <sv|nu_1> = b (1 - 1/N) real and positive.
struct NuState {
  LatticeConfig config;
  std::vector<ModeData> modes;
  std::vector<Complex> a_plus;
  std::vector<Complex> a_minus;
  double b = 0.0;

  std::vector<Complex> reduced_coefficients() const {
    std::vector<Complex> coeff(reduced_dimension(config), Complex{0.0, 0.0});
    for (std::size_t m = 0; m < modes.size(); ++m) {
      coeff[1 + 2 * m] = a_plus[m];
      coeff[2 + 2 * m] = a_minus[m];
    }
    return coeff;
  }

  StateVector assemble() const { return assemble_reduced(config, modes, reduced_coefficients()); }
};

inline NuState nu_coefficients(const LatticeConfig& cfg) {
  cfg.validate();
  if (!cfg.odd_side()) throw std::invalid_argument("localised state requires an odd side length");
  NuState nu;
  nu.config = cfg;
  nu.modes = mode_table(cfg);
  nu.a_plus.resize(nu.modes.size());
  nu.a_minus.resize(nu.modes.size());
  KahanAccumulator<double> norm2;
  for (std::size_t m = 0; m < nu.modes.size(); ++m) {
    const ModeData& mode = nu.modes[m];
    if (!(mode.theta > 1e-12)) throw std::domain_error("theta_k = 0 for k != 0; cannot build the localised state");
    const Complex z = std::polar(1.0, mode.theta);
    nu.a_plus[m] = -2.0 * mode.sv_coeff * z / (1.0 - z);
    nu.a_minus[m] = -2.0 * mode.sv_coeff * std::conj(z) / (1.0 - std::conj(z));
    norm2.add(std::norm(nu.a_plus[m]));
    norm2.add(std::norm(nu.a_minus[m]));
  }
  nu.b = 1.0 / std::sqrt(norm2.value());
  for (std::size_t m = 0; m < nu.modes.size(); ++m) {
    nu.a_plus[m] *= nu.b;
    nu.a_minus[m] *= nu.b;
  }
  return nu;
}

// <nu_1|U0|sv>, measured in the full space. Equals -b (1 - 1/N): the
// localisation on the nearest neighbours of the mark matches the
// localisation on the mark itself.
inline Complex overlap_nu_u0sv(const NuState& nu) {
  const StateVector nu_full = nu.assemble();
  const StateVector u0sv = apply_u0(nu.config, make_sv(nu.config));
  return inner_product(nu_full, u0sv);
}

}  // namespace qwsearch
