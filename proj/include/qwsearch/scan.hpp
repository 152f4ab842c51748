#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qwsearch/localized.hpp"
#include "qwsearch/modes.hpp"

namespace qwsearch {

// Eigenphase scan of U_lambda in the reduced space. The rank-one coupling
// bends pairs of phase curves into avoided crossings; the one at
// lambda = 1, omega = 0 carries the search. Dense eigensolves cost
// O((2N-1)^3) per grid point, hence the dimension cap.

struct ScanOptions {
  double lambda_min = 0.8;
  double lambda_max = 1.2;
  int points = 81;
  std::size_t max_dim = 1500;
  bool parallel = true;
};

struct ScanResult {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> eigenphases;  // per lambda, sorted ascending, in (-pi, pi]
  double gap_at_crossing = 0.0;                  // measured at lambda = 1
  double subspace_overlap = 0.0;                 // crossing pair vs span{phi_0, nu_1}
};

namespace detail {

inline void require_scannable(const LatticeConfig& cfg, std::size_t max_dim) {
  cfg.validate();
  if (!cfg.odd_side()) throw std::invalid_argument("spectrum scan requires an odd side length");
  if (reduced_dimension(cfg) > max_dim)
    throw std::length_error("reduced dimension " + std::to_string(reduced_dimension(cfg)) +
                            " exceeds the dense-solve cap of " + std::to_string(max_dim) +
                            "; use the simulation commands for lattices this large");
}

inline std::vector<double> sorted_eigenphases(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
  std::vector<double> phases(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index j = 0; j < m.rows(); ++j) phases[static_cast<std::size_t>(j)] = std::arg(solver.eigenvalues()(j));
  std::sort(phases.begin(), phases.end());
  return phases;
}

struct CrossingInfo {
  double gap = 0.0;
  double overlap = 0.0;
};

// Dense solve at lambda = 1: gap between the two eigenphases nearest zero
// and the squared Frobenius overlap of their span with span{phi_0, nu_1}.
inline CrossingInfo crossing_info(const LatticeConfig& cfg) {
  const Eigen::MatrixXcd m = reduced_u_lambda(cfg, 1.0).dense();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, true);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
  const Eigen::Index dim = m.rows();
  if (dim < 2) throw std::runtime_error("reduced space too small to hold a crossing pair");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  for (Eigen::Index j = 0; j < dim; ++j) order[static_cast<std::size_t>(j)] = j;
  auto abs_phase = [&](Eigen::Index j) { return std::abs(std::arg(solver.eigenvalues()(j))); };
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double pa = abs_phase(a), pb = abs_phase(b);
    if (pa != pb) return pa < pb;
    return a < b;
  });
  const Eigen::Index i0 = order[0];
  const Eigen::Index i1 = order[1];
  if (abs_phase(i0) > 1.0 || abs_phase(i1) > 1.0)
    throw std::runtime_error("no pair of near-zero eigenphases found at lambda = 1");

  CrossingInfo info;
  info.gap = std::abs(std::arg(solver.eigenvalues()(i0)) - std::arg(solver.eigenvalues()(i1)));

  // Orthonormalise the crossing pair, then project onto {phi_0, nu_1}.
  Eigen::MatrixXcd w(dim, 2);
  w.col(0) = solver.eigenvectors().col(i0);
  w.col(1) = solver.eigenvectors().col(i1);
  w.col(0).normalize();
  w.col(1) -= w.col(0).dot(w.col(1)) * w.col(0);
  const double tail = w.col(1).norm();
  if (tail < 1e-12) throw std::runtime_error("crossing eigenvectors are numerically parallel");
  w.col(1) /= tail;

  const NuState nu = nu_coefficients(cfg);
  const std::vector<Complex> nu_coeff = nu.reduced_coefficients();
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(dim, 2);
  q(0, 0) = Complex{1.0, 0.0};
  for (Eigen::Index j = 0; j < dim; ++j) q(j, 1) = nu_coeff[static_cast<std::size_t>(j)];
  q.col(1).normalize();

  info.overlap = 0.5 * (q.adjoint() * w).squaredNorm();
  return info;
}

}  // namespace detail

inline double crossing_gap(const LatticeConfig& cfg, std::size_t max_dim = ScanOptions{}.max_dim) {
  detail::require_scannable(cfg, max_dim);
  return detail::crossing_info(cfg).gap;
}

inline double crossing_subspace_overlap(const LatticeConfig& cfg, std::size_t max_dim = ScanOptions{}.max_dim) {
  detail::require_scannable(cfg, max_dim);
  return detail::crossing_info(cfg).overlap;
}

// Distance between two phases on the unit circle.
inline double circular_distance(double a, double b) {
  double diff = std::fmod(a - b, 2.0 * std::numbers::pi);
  if (diff > std::numbers::pi) diff -= 2.0 * std::numbers::pi;
  if (diff < -std::numbers::pi) diff += 2.0 * std::numbers::pi;
  return std::abs(diff);
}

// Carries branch identities across the lambda grid by nearest-phase
// matching on the circle. Sorted principal values reshuffle whenever a
// curve drifts through +-pi, so positions alone do not identify curves.
// Entry [j][b] is the eigenphase of branch b at lambda_j; branch order at
// the first grid point is ascending phase.
inline std::vector<std::vector<double>> track_branches(const ScanResult& result) {
  std::vector<std::vector<double>> tracked(result.eigenphases.size());
  if (result.eigenphases.empty()) return tracked;
  tracked[0] = result.eigenphases[0];
  const std::size_t m = tracked[0].size();
  struct Candidate {
    double dist;
    std::size_t branch, idx;
  };
  for (std::size_t j = 1; j < result.eigenphases.size(); ++j) {
    const std::vector<double>& prev = tracked[j - 1];
    const std::vector<double>& cur = result.eigenphases[j];
    std::vector<Candidate> candidates;
    candidates.reserve(m * m);
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t i = 0; i < m; ++i) candidates.push_back({circular_distance(prev[b], cur[i]), b, i});
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
      if (x.dist != y.dist) return x.dist < y.dist;
      if (x.branch != y.branch) return x.branch < y.branch;
      return x.idx < y.idx;
    });
    tracked[j].assign(m, 0.0);
    std::vector<bool> branch_done(m, false), idx_done(m, false);
    std::size_t assigned = 0;
    for (const Candidate& c : candidates) {
      if (branch_done[c.branch] || idx_done[c.idx]) continue;
      tracked[j][c.branch] = cur[c.idx];
      branch_done[c.branch] = true;
      idx_done[c.idx] = true;
      if (++assigned == m) break;
    }
  }
  return tracked;
}

inline ScanResult scan(const LatticeConfig& cfg, const ScanOptions& opt = {}) {
  detail::require_scannable(cfg, opt.max_dim);
  if (opt.points < 2) throw std::invalid_argument("scan needs at least two grid points");
  if (!(opt.lambda_min < opt.lambda_max)) throw std::invalid_argument("scan window must satisfy min < max");

  ScanResult result;
  result.lambdas.resize(static_cast<std::size_t>(opt.points));
  result.eigenphases.resize(static_cast<std::size_t>(opt.points));
  for (int j = 0; j < opt.points; ++j)
    result.lambdas[static_cast<std::size_t>(j)] =
        opt.lambda_min + (opt.lambda_max - opt.lambda_min) * j / (opt.points - 1);

  auto solve_point = [&](int j) {
    const ReducedMatrix m = reduced_u_lambda(cfg, result.lambdas[static_cast<std::size_t>(j)]);
    result.eigenphases[static_cast<std::size_t>(j)] = detail::sorted_eigenphases(m.dense());
  };

  // Grid points are independent; merge order is fixed by index.
  const unsigned workers = opt.parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
  if (workers > 1) {
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&, w]() {
        for (int j = static_cast<int>(w); j < opt.points; j += static_cast<int>(workers)) solve_point(j);
      }));
    }
    for (auto& fut : futures) fut.get();
  } else {
    for (int j = 0; j < opt.points; ++j) solve_point(j);
  }

  const detail::CrossingInfo info = detail::crossing_info(cfg);
  result.gap_at_crossing = info.gap;
  result.subspace_overlap = info.overlap;
  return result;
}

}  // namespace qwsearch
