#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qwsearch/state.hpp"
#include "qwsearch/walk.hpp"

namespace qwsearch {

// Fourier-mode decomposition of the unperturbed walk U0. Every momentum
// vector k carries a conjugate pair of eigenvalues e^{+-i theta_k} with
//   cos theta_k = (1/d) sum_i cos(2 pi k_i / n),
// whose coin eigenvectors u_k^+- overlap the uniform coin state as
// <s|u_k^+-> = 1/sqrt(2). Together with the uniform state phi_0 they span
// the (2N-1)-dimensional reduced space in which the search happens; the
// remaining +-1 eigenvectors of U0 never couple to the marked vertex.

namespace detail {
inline void require_valid_mode(const LatticeConfig& cfg, std::span<const int> k) {
  if (static_cast<int>(k.size()) != cfg.dim) throw std::invalid_argument("mode vector has wrong length");
  bool all_zero = true;
  for (int i = 0; i < cfg.dim; ++i) {
    if (k[i] < 0 || k[i] >= cfg.side) throw std::invalid_argument("mode component outside [0, n)");
    if (k[i] != 0) all_zero = false;
  }
  if (all_zero) throw std::invalid_argument("k = 0 is reserved for the uniform mode phi_0");
}
}  // namespace detail

inline double mode_eigenphase(const LatticeConfig& cfg, std::span<const int> k) {
  detail::require_valid_mode(cfg, k);
  double mean = 0.0;
  for (int i = 0; i < cfg.dim; ++i) mean += std::cos(2.0 * std::numbers::pi * k[i] / cfg.side);
  mean /= cfg.dim;
  if (mean > 1.0) mean = 1.0;
  if (mean < -1.0) mean = -1.0;
  return std::acos(mean);
}

// The 2d x 2d coin-space block B_k with U0 (u (x) X_k) = (B_k u) (x) X_k.
// The shift contributes a per-axis swap with phases alpha^{+-k_i}; the coin
// contributes sigma = 2|s><s| - 1.
inline Eigen::MatrixXcd mode_block(const LatticeConfig& cfg, std::span<const int> k) {
  if (static_cast<int>(k.size()) != cfg.dim) throw std::invalid_argument("mode vector has wrong length");
  const int m = 2 * cfg.dim;
  Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Constant(m, m, Complex{1.0 / cfg.dim, 0.0});
  sigma -= Eigen::MatrixXcd::Identity(m, m);
  Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(m, m);
  for (int axis = 0; axis < cfg.dim; ++axis) {
    const double angle = 2.0 * std::numbers::pi * k[axis] / cfg.side;
    shift(2 * axis, 2 * axis + 1) = std::polar(1.0, angle);    // (S_k u)(i+) = alpha^{k_i} u(i-)
    shift(2 * axis + 1, 2 * axis) = std::polar(1.0, -angle);   // (S_k u)(i-) = alpha^{-k_i} u(i+)
  }
  return shift * sigma;
}

struct CoinEigenvectors {
  Eigen::VectorXcd plus;   // eigenvector of B_k for e^{+i theta_k}
  Eigen::VectorXcd minus;  // eigenvector of B_k for e^{-i theta_k}
};

// Dense eigensolve of the 2d x 2d block, gauge-fixed so that <s|u_+-> is
// real and positive (then the |sv> expansion coefficients come out as
// alpha^{-k.v}/sqrt(2N) with no extra phases). Degenerate blocks with
// theta_k in {0, pi} (even side lengths) are rejected.
inline CoinEigenvectors coin_eigenvectors(const LatticeConfig& cfg, std::span<const int> k) {
  const double theta = mode_eigenphase(cfg, k);
  constexpr double kDegenerate = 1e-9;
  if (theta < kDegenerate || theta > std::numbers::pi - kDegenerate)
    throw std::domain_error("degenerate +- pair (theta_k = 0 or pi); restrict to odd side lengths");

  const Eigen::MatrixXcd block = mode_block(cfg, k);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(block, true);
  if (solver.info() != Eigen::Success) throw std::runtime_error("coin block eigensolve failed");

  const int m = 2 * cfg.dim;
  const Eigen::VectorXcd s = Eigen::VectorXcd::Constant(m, Complex{1.0 / std::sqrt(2.0 * cfg.dim), 0.0});
  auto pick = [&](double sign) {
    const Complex target = std::polar(1.0, sign * theta);
    int best = 0;
    double best_dist = std::abs(solver.eigenvalues()(0) - target);
    for (int j = 1; j < m; ++j) {
      const double dist = std::abs(solver.eigenvalues()(j) - target);
      if (dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    if (best_dist > 1e-8) throw std::runtime_error("expected eigenvalue e^{+-i theta_k} not found in coin block");
    Eigen::VectorXcd u = solver.eigenvectors().col(best);
    const Complex overlap = s.dot(u);  // <s|u>
    if (std::abs(overlap) < 1e-8) throw std::runtime_error("coin eigenvector unexpectedly orthogonal to |s>");
    u *= std::conj(overlap) / std::abs(overlap);
    u.normalize();
    return u;
  };
  return {pick(+1.0), pick(-1.0)};
}

struct ModeData {
  std::vector<int> k;
  double theta = 0.0;
  Eigen::VectorXcd u_plus;
  Eigen::VectorXcd u_minus;
  Complex sv_coeff{0.0, 0.0};  // alpha^{-k.v} / sqrt(2N)
};

// All N-1 nonzero modes in flat index order of k. Requires an odd side
// length so every +- pair is non-degenerate.
inline std::vector<ModeData> mode_table(const LatticeConfig& cfg) {
  cfg.validate();
  if (!cfg.odd_side()) throw std::invalid_argument("mode table requires an odd side length");
  const long long N = cfg.vertex_count();
  std::vector<ModeData> modes;
  modes.reserve(static_cast<std::size_t>(N - 1));
  const double coeff_scale = 1.0 / std::sqrt(2.0 * static_cast<double>(N));
  for (long long flat = 1; flat < N; ++flat) {
    ModeData mode;
    mode.k = coordinates(cfg, flat);
    mode.theta = mode_eigenphase(cfg, mode.k);
    CoinEigenvectors uv = coin_eigenvectors(cfg, mode.k);
    mode.u_plus = std::move(uv.plus);
    mode.u_minus = std::move(uv.minus);
    long long kv = 0;
    for (int i = 0; i < cfg.dim; ++i) kv += static_cast<long long>(mode.k[static_cast<std::size_t>(i)]) * cfg.marked[static_cast<std::size_t>(i)];
    mode.sv_coeff = std::polar(coeff_scale, -2.0 * std::numbers::pi * static_cast<double>(kv % cfg.side) / cfg.side);
    modes.push_back(std::move(mode));
  }
  return modes;
}

// Full-space eigenvector u (x) X_k of U0; sign +1 assembles phi_k^+.
inline StateVector assemble_mode(const LatticeConfig& cfg, const ModeData& mode, int sign) {
  const long long N = cfg.vertex_count();
  const Eigen::VectorXcd& u = (sign >= 0) ? mode.u_plus : mode.u_minus;
  StateVector psi(static_cast<std::size_t>(cfg.amplitude_count()));
  // X_k(x) = alpha^{k.x} / sqrt(N); phases looked up in a length-n root table.
  std::vector<Complex> roots(static_cast<std::size_t>(cfg.side));
  for (int r = 0; r < cfg.side; ++r)
    roots[static_cast<std::size_t>(r)] = std::polar(1.0 / std::sqrt(static_cast<double>(N)),
                                                    2.0 * std::numbers::pi * r / cfg.side);
  std::vector<int> x(static_cast<std::size_t>(cfg.dim), 0);
  for (long long flat = 0; flat < N; ++flat) {
    long long kx = 0;
    for (int i = 0; i < cfg.dim; ++i) kx += static_cast<long long>(mode.k[static_cast<std::size_t>(i)]) * x[static_cast<std::size_t>(i)];
    const Complex pos = roots[static_cast<std::size_t>(kx % cfg.side)];
    for (int c = 0; c < 2 * cfg.dim; ++c) psi[amp_index(cfg, c, flat)] = u(c) * pos;
    for (int i = cfg.dim - 1; i >= 0; --i) {
      if (++x[static_cast<std::size_t>(i)] < cfg.side) break;
      x[static_cast<std::size_t>(i)] = 0;
    }
  }
  return psi;
}

// Reduced-basis order used throughout: [phi_0, phi_{k_1}^+, phi_{k_1}^-,
// phi_{k_2}^+, ...] with modes in flat k order.
inline std::size_t reduced_dimension(const LatticeConfig& cfg) {
  return static_cast<std::size_t>(2 * cfg.vertex_count() - 1);
}

// Expansion coefficients of |sv> over the reduced basis: 1/sqrt(N) on phi_0
// and alpha^{-k.v}/sqrt(2N) on each phi_k^+-; unit norm overall.
inline std::vector<Complex> sv_coefficients(const LatticeConfig& cfg) {
  cfg.validate();
  if (!cfg.odd_side()) throw std::invalid_argument("sv expansion requires an odd side length");
  const long long N = cfg.vertex_count();
  std::vector<Complex> coeff(reduced_dimension(cfg));
  coeff[0] = Complex{1.0 / std::sqrt(static_cast<double>(N)), 0.0};
  const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(N));
  std::vector<int> k(static_cast<std::size_t>(cfg.dim), 0);
  for (long long flat = 1; flat < N; ++flat) {
    for (int i = cfg.dim - 1; i >= 0; --i) {
      if (++k[static_cast<std::size_t>(i)] < cfg.side) break;
      k[static_cast<std::size_t>(i)] = 0;
    }
    long long kv = 0;
    for (int i = 0; i < cfg.dim; ++i) kv += static_cast<long long>(k[static_cast<std::size_t>(i)]) * cfg.marked[static_cast<std::size_t>(i)];
    const Complex c = std::polar(scale, -2.0 * std::numbers::pi * static_cast<double>(kv % cfg.side) / cfg.side);
    coeff[static_cast<std::size_t>(2 * flat - 1)] = c;
    coeff[static_cast<std::size_t>(2 * flat)] = c;
  }
  return coeff;
}

// Assembles sum_a coeff[a] * basis[a] in the full space, coeff in reduced
// basis order.
inline StateVector assemble_reduced(const LatticeConfig& cfg, const std::vector<ModeData>& modes,
                                    std::span<const Complex> coeff) {
  if (coeff.size() != reduced_dimension(cfg)) throw std::invalid_argument("coefficient vector has wrong length");
  StateVector out(static_cast<std::size_t>(cfg.amplitude_count()), Complex{0.0, 0.0});
  if (coeff[0] != Complex{0.0, 0.0}) {
    const StateVector phi0 = make_phi0(cfg);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += coeff[0] * phi0[j];
  }
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (int sign : {+1, -1}) {
      const Complex c = coeff[1 + 2 * m + (sign < 0 ? 1 : 0)];
      if (c == Complex{0.0, 0.0}) continue;
      const StateVector basis = assemble_mode(cfg, modes[m], sign);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += c * basis[j];
    }
  }
  return out;
}

// U_lambda restricted to the reduced space, stored implicitly as diagonal
// phases plus the rank-one coupling vector c:
//   M_ab = e^{i phase_a} (delta_ab + (e^{i pi lambda} - 1) c_a conj(c_b)).
struct ReducedMatrix {
  std::vector<double> phases;
  std::vector<Complex> coeff;
  double lambda = 0.0;

  std::size_t dim() const { return phases.size(); }

  static ReducedMatrix from_parts(std::vector<double> phases, std::vector<Complex> coeff, double lambda) {
    if (phases.size() != coeff.size()) throw std::invalid_argument("phase and coefficient vectors differ in size");
    return {std::move(phases), std::move(coeff), lambda};
  }

  Eigen::MatrixXcd dense() const {
    const auto n = static_cast<Eigen::Index>(dim());
    const Complex w = std::polar(1.0, std::numbers::pi * lambda) - 1.0;
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      const Complex row_phase = std::polar(1.0, phases[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < n; ++b) {
        Complex entry = w * coeff[static_cast<std::size_t>(a)] * std::conj(coeff[static_cast<std::size_t>(b)]);
        if (a == b) entry += 1.0;
        m(a, b) = row_phase * entry;
      }
    }
    return m;
  }

  // M v without materialising the dense matrix.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
    const auto n = static_cast<Eigen::Index>(dim());
    if (v.size() != n) throw std::invalid_argument("vector has wrong length");
    const Complex w = std::polar(1.0, std::numbers::pi * lambda) - 1.0;
    Complex ip{0.0, 0.0};
    for (Eigen::Index b = 0; b < n; ++b) ip += std::conj(coeff[static_cast<std::size_t>(b)]) * v(b);
    Eigen::VectorXcd out(n);
    for (Eigen::Index a = 0; a < n; ++a)
      out(a) = std::polar(1.0, phases[static_cast<std::size_t>(a)]) *
               (v(a) + w * coeff[static_cast<std::size_t>(a)] * ip);
    return out;
  }
};

inline ReducedMatrix reduced_u_lambda(const LatticeConfig& cfg, double lambda) {
  cfg.validate();
  if (!cfg.odd_side()) throw std::invalid_argument("reduced operator requires an odd side length");
  const long long N = cfg.vertex_count();
  std::vector<double> phases(reduced_dimension(cfg), 0.0);
  std::vector<int> k(static_cast<std::size_t>(cfg.dim), 0);
  for (long long flat = 1; flat < N; ++flat) {
    for (int i = cfg.dim - 1; i >= 0; --i) {
      if (++k[static_cast<std::size_t>(i)] < cfg.side) break;
      k[static_cast<std::size_t>(i)] = 0;
    }
    const double theta = mode_eigenphase(cfg, k);
    phases[static_cast<std::size_t>(2 * flat - 1)] = theta;
    phases[static_cast<std::size_t>(2 * flat)] = -theta;
  }
  return ReducedMatrix::from_parts(std::move(phases), sv_coefficients(cfg), lambda);
}

}  // namespace qwsearch
