#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwsearch {

// Upper bound on 2*d*N, the number of complex amplitudes a full state holds.
inline constexpr long long kMaxAmplitudes = 1LL << 27;

// A periodic d-dimensional lattice with n vertices per axis and one marked
// vertex. Vertex coordinates are integer vectors x with x_i in [0, n).
//
// Flattening convention (used everywhere, including CSV output): row-major
// with the last axis fastest,
//   flat(x) = ((x_1 * n + x_2) * n + ...) * n + x_d,
// so e.g. d=2, n=3 maps (1,0) -> 3.
struct LatticeConfig {
  int dim = 2;              // d >= 1
  int side = 2;             // n >= 2
  std::vector<int> marked;  // marked vertex v, one coordinate per axis

  // Marked vertex defaulting to the lattice centre, floor(n/2) per axis.
  static LatticeConfig centered(int d, int n) {
    LatticeConfig cfg;
    cfg.dim = d;
    cfg.side = n;
    cfg.marked.assign(static_cast<std::size_t>(d > 0 ? d : 0), n / 2);
    cfg.validate();
    return cfg;
  }

  long long vertex_count() const {
    long long count = 1;
    for (int i = 0; i < dim; ++i) {
      if (count > kMaxAmplitudes) throw std::length_error("lattice too large: n^d overflows the supported range");
      count *= side;
    }
    return count;
  }

  long long amplitude_count() const { return 2LL * dim * vertex_count(); }

  bool odd_side() const { return side % 2 == 1; }

  void validate() const {
    if (dim < 1) throw std::invalid_argument("lattice dimension must be >= 1");
    if (side < 2) throw std::invalid_argument("lattice side length must be >= 2");
    if (static_cast<int>(marked.size()) != dim)
      throw std::invalid_argument("marked vertex must have one coordinate per axis");
    for (int c : marked) {
      if (c < 0 || c >= side)
        throw std::invalid_argument("marked vertex coordinate " + std::to_string(c) + " outside [0, " +
                                    std::to_string(side) + ")");
    }
    if (amplitude_count() > kMaxAmplitudes)
      throw std::length_error("state vector of 2dN = " + std::to_string(amplitude_count()) +
                              " amplitudes exceeds the supported size");
  }
};

inline long long flat_index(const LatticeConfig& cfg, std::span<const int> x) {
  if (static_cast<int>(x.size()) != cfg.dim)
    throw std::invalid_argument("coordinate vector has wrong length");
  long long flat = 0;
  for (int i = 0; i < cfg.dim; ++i) {
    if (x[i] < 0 || x[i] >= cfg.side)
      throw std::invalid_argument("coordinate " + std::to_string(x[i]) + " outside [0, " +
                                  std::to_string(cfg.side) + ")");
    flat = flat * cfg.side + x[i];
  }
  return flat;
}

inline std::vector<int> coordinates(const LatticeConfig& cfg, long long flat) {
  if (flat < 0 || flat >= cfg.vertex_count()) throw std::invalid_argument("flat vertex index out of range");
  std::vector<int> x(static_cast<std::size_t>(cfg.dim));
  for (int i = cfg.dim - 1; i >= 0; --i) {
    x[static_cast<std::size_t>(i)] = static_cast<int>(flat % cfg.side);
    flat /= cfg.side;
  }
  return x;
}

inline long long marked_index(const LatticeConfig& cfg) { return flat_index(cfg, cfg.marked); }

}  // namespace qwsearch
