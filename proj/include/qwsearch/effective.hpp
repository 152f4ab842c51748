#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qwsearch/localized.hpp"

namespace qwsearch {

// Two-level model of the avoided crossing. On span{phi_0, nu_1} the search
// walk acts to leading order as
//   U = [[1, -eps], [eps, 1]],  eps = 2b/sqrt(N),
// i.e. U = e^{-iH} with H = [[0, -i eps], [i eps, 0]]. The gap between the
// crossing eigenphases is delta = 2 eps = 4b/sqrt(N) and a quarter rotation
// takes T = pi/(2 eps) = pi sqrt(N)/(4b) steps.
struct EffectiveModel {
  double b = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double t_real = 0.0;
  long long t_steps = 0;
  Eigen::Matrix2cd u2x2;
};

// Nearest integer, half-integers rounding up.
inline long long round_steps(double t) { return static_cast<long long>(std::floor(t + 0.5)); }

inline EffectiveModel build_model(double b, long long N) {
  if (!(b > 0.0)) throw std::invalid_argument("normalisation constant b must be positive");
  if (N < 2) throw std::invalid_argument("vertex count must be >= 2");
  EffectiveModel model;
  model.b = b;
  model.epsilon = 2.0 * b / std::sqrt(static_cast<double>(N));
  model.delta = 2.0 * model.epsilon;
  model.t_real = std::numbers::pi / (2.0 * model.epsilon);
  model.t_steps = round_steps(model.t_real);
  model.u2x2 << Complex{1.0, 0.0}, Complex{-model.epsilon, 0.0}, Complex{model.epsilon, 0.0}, Complex{1.0, 0.0};
  return model;
}

// Amplitudes of e^{-iHt} applied to (1, 0): a real rotation (cos eps t,
// sin eps t) in the {phi_0, nu_1} basis. At t = T the state is pure nu_1.
inline std::array<double, 2> rotation_amplitudes(const EffectiveModel& model, double t) {
  return {std::cos(model.epsilon * t), std::sin(model.epsilon * t)};
}

inline std::vector<std::array<double, 2>> rotation_trajectory(const EffectiveModel& model, int t_max) {
  if (t_max < 0) throw std::invalid_argument("t_max must be >= 0");
  std::vector<std::array<double, 2>> traj;
  traj.reserve(static_cast<std::size_t>(t_max) + 1);
  for (int t = 0; t <= t_max; ++t) traj.push_back(rotation_amplitudes(model, t));
  return traj;
}

// The four matrix elements of U1 on {phi_0, nu_1}, measured by full-space
// inner products rather than taken from the model. Row/column order is
// (phi_0, nu_1).
inline Eigen::Matrix2cd measured_matrix_elements(const NuState& nu) {
  const LatticeConfig& cfg = nu.config;
  const StateVector phi0 = make_phi0(cfg);
  const StateVector nu_full = nu.assemble();
  const StateVector u1_phi0 = apply_u1(cfg, phi0);
  const StateVector u1_nu = apply_u1(cfg, nu_full);
  Eigen::Matrix2cd m;
  m(0, 0) = inner_product(phi0, u1_phi0);
  m(0, 1) = inner_product(phi0, u1_nu);
  m(1, 0) = inner_product(nu_full, u1_phi0);
  m(1, 1) = inner_product(nu_full, u1_nu);
  return m;
}

// Predicted number of steps to the localisation peak, with b from the
// chosen normalisation route.
inline long long search_time(int d, int n, NormMethod method) {
  const NormResult norm = compute_norm(d, n, method);
  double N = 1.0;
  for (int i = 0; i < d; ++i) N *= n;
  const EffectiveModel model = build_model(b_from(norm), static_cast<long long>(N));
  return model.t_steps;
}

}  // namespace qwsearch
