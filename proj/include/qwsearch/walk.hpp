#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qwsearch/state.hpp"

namespace qwsearch {

// Matrix-free application of the walk operators:
//   coin   C  = (2|s><s| - 1) per vertex, |s> uniform over the 2d directions
//   shift  S  : (i+, x) -> (i-, x+e_i), (i-, x) -> (i+, x-e_i), periodic
//   U0 = S C, U1 = U0 (1 - 2|sv><sv|), U_lambda = U0 (1 + (e^{i pi lambda}-1)|sv><sv|)
// where |sv> = |s> (x) |v> concentrates on the marked vertex.

namespace detail {
inline void require_state_size(const LatticeConfig& cfg, const StateVector& psi) {
  if (psi.size() != static_cast<std::size_t>(cfg.amplitude_count()))
    throw std::invalid_argument("state vector size does not match the lattice");
}
}  // namespace detail

// Uniform superposition |s> (x) |v> on the 2d coin slots of the marked vertex.
inline StateVector make_sv(const LatticeConfig& cfg) {
  cfg.validate();
  StateVector psi(static_cast<std::size_t>(cfg.amplitude_count()), Complex{0.0, 0.0});
  const double amp = 1.0 / std::sqrt(2.0 * cfg.dim);
  const long long v = marked_index(cfg);
  for (int c = 0; c < 2 * cfg.dim; ++c) psi[amp_index(cfg, c, v)] = amp;
  return psi;
}

// Uniform distribution over the whole space, the 1-eigenstate of U0.
inline StateVector make_phi0(const LatticeConfig& cfg) {
  cfg.validate();
  const double amp = 1.0 / std::sqrt(static_cast<double>(cfg.amplitude_count()));
  return StateVector(static_cast<std::size_t>(cfg.amplitude_count()), Complex{amp, 0.0});
}

// <sv|psi>, touching only the 2d amplitudes at the marked vertex.
inline Complex sv_overlap(const LatticeConfig& cfg, const StateVector& psi) {
  detail::require_state_size(cfg, psi);
  const long long v = marked_index(cfg);
  Complex sum{0.0, 0.0};
  for (int c = 0; c < 2 * cfg.dim; ++c) sum += psi[amp_index(cfg, c, v)];
  return sum / std::sqrt(2.0 * cfg.dim);
}

inline StateVector apply_coin(const LatticeConfig& cfg, const StateVector& psi) {
  detail::require_state_size(cfg, psi);
  const long long N = cfg.vertex_count();
  const int planes = 2 * cfg.dim;
  std::vector<Complex> colsum(static_cast<std::size_t>(N), Complex{0.0, 0.0});
  for (int c = 0; c < planes; ++c) {
    const Complex* plane = psi.data() + amp_index(cfg, c, 0);
    for (long long x = 0; x < N; ++x) colsum[static_cast<std::size_t>(x)] += plane[x];
  }
  const double inv_d = 1.0 / cfg.dim;
  StateVector out(psi.size());
  for (int c = 0; c < planes; ++c) {
    const Complex* in = psi.data() + amp_index(cfg, c, 0);
    Complex* dst = out.data() + amp_index(cfg, c, 0);
    for (long long x = 0; x < N; ++x) dst[x] = colsum[static_cast<std::size_t>(x)] * inv_d - in[x];
  }
  return out;
}

// The shift is a pure permutation (and an involution); amplitudes are moved,
// never combined, so it is norm-preserving to the last bit. Writes into a
// fresh buffer to avoid aliasing.
inline StateVector apply_shift(const LatticeConfig& cfg, const StateVector& psi) {
  detail::require_state_size(cfg, psi);
  const long long N = cfg.vertex_count();
  const int n = cfg.side;
  StateVector out(psi.size());
  long long stride = 1;
  for (int axis = cfg.dim - 1; axis >= 0; --axis) {
    const Complex* plus_in = psi.data() + amp_index(cfg, 2 * axis, 0);
    const Complex* minus_in = psi.data() + amp_index(cfg, 2 * axis + 1, 0);
    Complex* plus_out = out.data() + amp_index(cfg, 2 * axis, 0);
    Complex* minus_out = out.data() + amp_index(cfg, 2 * axis + 1, 0);
    for (long long x = 0; x < N; ++x) {
      const int coord = static_cast<int>((x / stride) % n);
      const long long up = (coord + 1 == n) ? x - (n - 1) * stride : x + stride;
      // (i+, x) -> (i-, x+e_i) and (i-, x) -> (i+, x-e_i)
      minus_out[up] = plus_in[x];
      plus_out[x] = minus_in[up];
    }
    stride *= n;
  }
  return out;
}

inline StateVector apply_u0(const LatticeConfig& cfg, const StateVector& psi) {
  return apply_shift(cfg, apply_coin(cfg, psi));
}

inline StateVector apply_u1(const LatticeConfig& cfg, const StateVector& psi) {
  const Complex ip = sv_overlap(cfg, psi);
  if (ip == Complex{0.0, 0.0}) return apply_u0(cfg, psi);  // local perturbation: untouched off the mark
  StateVector reflected = psi;
  const double amp = 1.0 / std::sqrt(2.0 * cfg.dim);
  const long long v = marked_index(cfg);
  for (int c = 0; c < 2 * cfg.dim; ++c) reflected[amp_index(cfg, c, v)] -= 2.0 * ip * amp;
  return apply_u0(cfg, reflected);
}

inline StateVector apply_u_lambda(const LatticeConfig& cfg, const StateVector& psi, double lambda) {
  if (lambda == 0.0) return apply_u0(cfg, psi);
  if (lambda == 1.0) return apply_u1(cfg, psi);
  const Complex weight = std::polar(1.0, std::numbers::pi * lambda) - 1.0;
  const Complex ip = sv_overlap(cfg, psi);
  StateVector shifted = psi;
  const double amp = 1.0 / std::sqrt(2.0 * cfg.dim);
  const long long v = marked_index(cfg);
  for (int c = 0; c < 2 * cfg.dim; ++c) shifted[amp_index(cfg, c, v)] += weight * ip * amp;
  return apply_u0(cfg, shifted);
}

// Which operator drives a time evolution.
struct StepOperator {
  enum class Kind { unperturbed, search, interpolated };
  Kind kind = Kind::search;
  double lambda = 1.0;

  static StepOperator u0() { return {Kind::unperturbed, 0.0}; }
  static StepOperator u1() { return {Kind::search, 1.0}; }
  static StepOperator u_lambda(double lambda) { return {Kind::interpolated, lambda}; }
};

struct TrajectoryPoint {
  int step = 0;
  double p_target = 0.0;  // coin-summed probability at the marked vertex
  double p_sv = 0.0;      // |<sv|psi>|^2, always <= p_target
};

using Trajectory = std::vector<TrajectoryPoint>;

// Evolves psi in place, recording the marked-vertex probabilities after
// every step (including the initial state at step 0).
inline Trajectory evolve_in_place(const LatticeConfig& cfg, StateVector& psi, StepOperator op, int steps) {
  cfg.validate();
  detail::require_state_size(cfg, psi);
  if (steps < 0) throw std::invalid_argument("step count must be >= 0");
  const long long v = marked_index(cfg);
  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(steps) + 1);
  auto record = [&](int t) {
    double p_target = 0.0;
    Complex coin_sum{0.0, 0.0};
    for (int c = 0; c < 2 * cfg.dim; ++c) {
      const Complex a = psi[amp_index(cfg, c, v)];
      p_target += std::norm(a);
      coin_sum += a;
    }
    const double p_sv = std::norm(coin_sum) / (2.0 * cfg.dim);
    traj.push_back({t, p_target, p_sv});
  };
  record(0);
  for (int t = 1; t <= steps; ++t) {
    switch (op.kind) {
      case StepOperator::Kind::unperturbed: psi = apply_u0(cfg, psi); break;
      case StepOperator::Kind::search: psi = apply_u1(cfg, psi); break;
      case StepOperator::Kind::interpolated: psi = apply_u_lambda(cfg, psi, op.lambda); break;
    }
    record(t);
  }
  return traj;
}

inline Trajectory evolve(const LatticeConfig& cfg, StateVector psi, StepOperator op, int steps) {
  return evolve_in_place(cfg, psi, op, steps);
}

class NoPeakFound : public std::runtime_error {
 public:
  explicit NoPeakFound(const std::string& what) : std::runtime_error(what) {}
};

struct Peak {
  int step = 0;
  double p_target = 0.0;
};

// Search peak of a trajectory: the highest p_target sample that exceeds ten
// times the initial value; ties break toward the smaller step. Step-to-step
// parity ripples are local maxima long before the walk has localised, so the
// peak is taken over the whole trajectory rather than at the first ripple.
// Throws NoPeakFound when no sample clears the threshold.
inline Peak find_peak(const Trajectory& traj) {
  if (traj.empty()) throw std::invalid_argument("empty trajectory");
  const double threshold = 10.0 * traj.front().p_target;
  bool found = false;
  Peak best;
  for (const TrajectoryPoint& pt : traj) {
    if (pt.p_target > threshold && (!found || pt.p_target > best.p_target)) {
      best = {pt.step, pt.p_target};
      found = true;
    }
  }
  if (!found) throw NoPeakFound("no peak found: no sample exceeds 10x the initial target probability");
  return best;
}

}  // namespace qwsearch
