#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qwsearch/kahan.hpp"

namespace qwsearch {

// Deterministic adaptive quadrature. One dimension uses a Gauss-Kronrod
// 7/15 pair; higher dimensions use the Genz-Malik degree 7/5 embedded
// cubature over hyper-rectangles. Both drive a worst-error-first heap with
// an insertion counter as tie-break, so results are bit-reproducible.

inline constexpr int kMaxCubatureDim = 8;

struct QuadratureOptions {
  double abs_tol = 1e-8;
  double rel_tol = 1e-9;
  long long max_evaluations = 20'000'000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  long long evaluations = 0;
  bool converged = false;
};

namespace quad_detail {

// QUADPACK dqk15 abscissae/weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class Region>
struct RegionOrder {
  // max-heap on error; older regions win ties
  bool operator()(const Region& lhs, const Region& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error;
    return lhs.id > rhs.id;
  }
};

// Common driver: keeps a binary heap of regions, always refines the one with
// the largest error estimate. Split(region) must push the replacement
// regions via the supplied sink.
template <class Region, class SplitFn>
QuadratureResult refine_loop(std::vector<Region>& heap, long long& evals, const QuadratureOptions& opt,
                             long long evals_per_region, SplitFn&& split) {
  RegionOrder<Region> order;
  std::make_heap(heap.begin(), heap.end(), order);
  double value_sum = 0.0;
  double error_sum = 0.0;
  for (const Region& r : heap) {
    value_sum += r.value;
    error_sum += r.error;
  }
  while (error_sum > std::max(opt.abs_tol, opt.rel_tol * std::abs(value_sum)) &&
         evals + 2 * evals_per_region <= opt.max_evaluations) {
    std::pop_heap(heap.begin(), heap.end(), order);
    Region worst = heap.back();
    heap.pop_back();
    value_sum -= worst.value;
    error_sum -= worst.error;
    auto sink = [&](Region&& child) {
      value_sum += child.value;
      error_sum += child.error;
      heap.push_back(std::move(child));
      std::push_heap(heap.begin(), heap.end(), order);
    };
    split(worst, sink);
  }
  // Assemble the final value with compensated summation over all regions.
  KahanAccumulator<double> value_acc, error_acc;
  for (const Region& r : heap) {
    value_acc.add(r.value);
    error_acc.add(r.error);
  }
  QuadratureResult result;
  result.value = value_acc.value();
  result.error = error_acc.value();
  result.evaluations = evals;
  result.converged = result.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(result.value));
  return result;
}

struct Segment {
  double a = 0.0, b = 0.0, value = 0.0, error = 0.0;
  std::uint64_t id = 0;
};

template <class F>
Segment evaluate_segment(F& f, double a, double b, std::uint64_t id) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kron = 0.0;
  double gauss = 0.0;
  for (std::size_t j = 0; j < 7; ++j) {
    const double offset = half * kKronrodNodes[j];
    const double sum = f(center - offset) + f(center + offset);
    kron += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  const double fc = f(center);
  kron += kKronrodWeights[7] * fc;
  gauss += kGaussWeights[3] * fc;
  return {a, b, kron * half, std::abs((kron - gauss) * half), id};
}

}  // namespace quad_detail

template <class F>
QuadratureResult integrate_gk15(F&& f, double a, double b, QuadratureOptions opt = {}) {
  if (!(a < b)) throw std::invalid_argument("integration bounds must satisfy a < b");
  std::uint64_t next_id = 0;
  long long evals = 0;
  std::vector<quad_detail::Segment> heap;
  heap.push_back(quad_detail::evaluate_segment(f, a, b, next_id++));
  evals += 15;
  auto split = [&](const quad_detail::Segment& worst, auto&& sink) {
    const double mid = 0.5 * (worst.a + worst.b);
    sink(quad_detail::evaluate_segment(f, worst.a, mid, next_id++));
    sink(quad_detail::evaluate_segment(f, mid, worst.b, next_id++));
    evals += 30;
  };
  return quad_detail::refine_loop(heap, evals, opt, 15, split);
}

namespace quad_detail {

struct Box {
  std::array<double, kMaxCubatureDim> center{};
  std::array<double, kMaxCubatureDim> halfwidth{};
  double value = 0.0, error = 0.0;
  int split_dim = 0;
  std::uint64_t id = 0;
};

// Genz-Malik embedded degree 7/5 rule on a hyper-rectangle (dim >= 2).
// Point pattern: centre, +-lambda2 and +-lambda4 along each axis,
// (+-lambda4, +-lambda4) on each axis pair, and the +-lambda5 corners.
template <class F>
Box evaluate_box(F& f, const std::array<double, kMaxCubatureDim>& center,
                 const std::array<double, kMaxCubatureDim>& halfwidth, int dim, std::uint64_t id,
                 long long& evals) {
  static const double lambda2 = std::sqrt(9.0 / 70.0);
  static const double lambda4 = std::sqrt(9.0 / 10.0);
  static const double lambda5 = std::sqrt(9.0 / 19.0);
  const double ratio = (lambda2 * lambda2) / (lambda4 * lambda4);

  double volume = 1.0;
  for (int j = 0; j < dim; ++j) volume *= 2.0 * halfwidth[j];

  const double w1 = volume * (12824.0 - 9120.0 * dim + 400.0 * dim * dim) / 19683.0;
  const double w2 = volume * 980.0 / 6561.0;
  const double w3 = volume * (1820.0 - 400.0 * dim) / 19683.0;
  const double w4 = volume * 200.0 / 19683.0;
  const double w5 = volume * 6859.0 / 19683.0 / static_cast<double>(1LL << dim);
  const double we1 = volume * (729.0 - 950.0 * dim + 50.0 * dim * dim) / 729.0;
  const double we2 = volume * 245.0 / 486.0;
  const double we3 = volume * (265.0 - 100.0 * dim) / 1458.0;
  const double we4 = volume * 25.0 / 729.0;

  std::array<double, kMaxCubatureDim> pt = center;
  const double f0 = f(std::span<const double>(pt.data(), static_cast<std::size_t>(dim)));

  double sum2 = 0.0, sum3 = 0.0;
  double max_divdiff = -1.0;
  int split_dim = 0;
  for (int j = 0; j < dim; ++j) {
    const double h = halfwidth[j];
    pt[j] = center[j] - lambda2 * h;
    const double f2a = f(std::span<const double>(pt.data(), static_cast<std::size_t>(dim)));
    pt[j] = center[j] + lambda2 * h;
    const double f2b = f(std::span<const double>(pt.data(), static_cast<std::size_t>(dim)));
    pt[j] = center[j] - lambda4 * h;
    const double f3a = f(std::span<const double>(pt.data(), static_cast<std::size_t>(dim)));
    pt[j] = center[j] + lambda4 * h;
    const double f3b = f(std::span<const double>(pt.data(), static_cast<std::size_t>(dim)));
    pt[j] = center[j];
    sum2 += f2a + f2b;
    sum3 += f3a + f3b;
    const double divdiff = std::abs(f2a + f2b - 2.0 * f0 - ratio * (f3a + f3b - 2.0 * f0));
    if (divdiff > max_divdiff) {
      max_divdiff = divdiff;
      split_dim = j;
    }
  }

  double sum4 = 0.0;
  for (int j = 0; j < dim; ++j) {
    for (int l = j + 1; l < dim; ++l) {
      for (int sj = -1; sj <= 1; sj += 2) {
        for (int sl = -1; sl <= 1; sl += 2) {
          pt[j] = center[j] + sj * lambda4 * halfwidth[j];
          pt[l] = center[l] + sl * lambda4 * halfwidth[l];
          sum4 += f(std::span<const double>(pt.data(), static_cast<std::size_t>(dim)));
        }
      }
      pt[j] = center[j];
      pt[l] = center[l];
    }
  }

  double sum5 = 0.0;
  for (std::uint64_t corner = 0; corner < (1ULL << dim); ++corner) {
    for (int j = 0; j < dim; ++j) {
      const double sign = (corner >> j) & 1 ? 1.0 : -1.0;
      pt[j] = center[j] + sign * lambda5 * halfwidth[j];
    }
    sum5 += f(std::span<const double>(pt.data(), static_cast<std::size_t>(dim)));
  }

  evals += 1 + 4LL * dim + 2LL * dim * (dim - 1) + (1LL << dim);

  Box box;
  box.center = center;
  box.halfwidth = halfwidth;
  const double rule7 = w1 * f0 + w2 * sum2 + w3 * sum3 + w4 * sum4 + w5 * sum5;
  const double rule5 = we1 * f0 + we2 * sum2 + we3 * sum3 + we4 * sum4;
  box.value = rule7;
  box.error = std::abs(rule7 - rule5);
  box.split_dim = split_dim;
  box.id = id;
  return box;
}

}  // namespace quad_detail

template <class F>
QuadratureResult integrate_genz_malik(F&& f, std::span<const double> lower, std::span<const double> upper,
                                      QuadratureOptions opt = {}) {
  const int dim = static_cast<int>(lower.size());
  if (dim < 2 || dim > kMaxCubatureDim) throw std::invalid_argument("cubature dimension must be in [2, 8]");
  if (upper.size() != lower.size()) throw std::invalid_argument("bound vectors differ in length");
  std::array<double, kMaxCubatureDim> center{}, halfwidth{};
  for (int j = 0; j < dim; ++j) {
    if (!(lower[j] < upper[j])) throw std::invalid_argument("integration bounds must satisfy lower < upper");
    center[j] = 0.5 * (lower[j] + upper[j]);
    halfwidth[j] = 0.5 * (upper[j] - lower[j]);
  }

  std::uint64_t next_id = 0;
  long long evals = 0;
  const long long per_region = 1 + 4LL * dim + 2LL * dim * (dim - 1) + (1LL << dim);
  std::vector<quad_detail::Box> heap;
  heap.push_back(quad_detail::evaluate_box(f, center, halfwidth, dim, next_id++, evals));

  auto split = [&](const quad_detail::Box& worst, auto&& sink) {
    const int axis = worst.split_dim;
    std::array<double, kMaxCubatureDim> h = worst.halfwidth;
    h[axis] *= 0.5;
    for (int side = -1; side <= 1; side += 2) {
      std::array<double, kMaxCubatureDim> c = worst.center;
      c[axis] += side * h[axis];
      sink(quad_detail::evaluate_box(f, c, h, dim, next_id++, evals));
    }
  };
  return quad_detail::refine_loop(heap, evals, opt, per_region, split);
}

}  // namespace qwsearch
