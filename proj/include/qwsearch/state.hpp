#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qwsearch/kahan.hpp"
#include "qwsearch/lattice.hpp"

namespace qwsearch {

using Complex = std::complex<double>;

// Full state of the walk: 2d direction planes of N vertex amplitudes each,
// stored plane-major. Plane 2i holds direction i+ (travel along +e_i) and
// plane 2i+1 holds direction i-, for axis i in [0, d).
using StateVector = std::vector<Complex>;

inline std::size_t amp_index(const LatticeConfig& cfg, int direction, long long vertex) {
  return static_cast<std::size_t>(direction) * static_cast<std::size_t>(cfg.vertex_count()) +
         static_cast<std::size_t>(vertex);
}

inline double norm_squared(const StateVector& psi) {
  KahanAccumulator<double> acc;
  for (const Complex& a : psi) acc.add(std::norm(a));
  return acc.value();
}

inline double state_norm(const StateVector& psi) { return std::sqrt(norm_squared(psi)); }

// <a|b> with the physics convention (conjugate-linear in the first slot).
inline Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner product of states with different sizes");
  KahanAccumulator<double> re, im;
  for (std::size_t j = 0; j < a.size(); ++j) {
    Complex t = std::conj(a[j]) * b[j];
    re.add(t.real());
    im.add(t.imag());
  }
  return {re.value(), im.value()};
}

// Per-vertex probability grid: entry x is the coin-summed |psi(c,x)|^2.
// Entries sum to the squared state norm.
inline std::vector<double> snapshot(const LatticeConfig& cfg, const StateVector& psi) {
  const long long N = cfg.vertex_count();
  if (psi.size() != static_cast<std::size_t>(cfg.amplitude_count()))
    throw std::invalid_argument("state vector size does not match the lattice");
  std::vector<double> grid(static_cast<std::size_t>(N), 0.0);
  for (int c = 0; c < 2 * cfg.dim; ++c) {
    const Complex* plane = psi.data() + amp_index(cfg, c, 0);
    for (long long x = 0; x < N; ++x) grid[static_cast<std::size_t>(x)] += std::norm(plane[x]);
  }
  return grid;
}

}  // namespace qwsearch
