#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qwsearch/qwsearch.hpp"

using namespace qwsearch;

TEST_CASE("lambda = 0 spectrum is the unperturbed one") {
  const LatticeConfig cfg = LatticeConfig::centered(2, 5);
  const ReducedMatrix rm = reduced_u_lambda(cfg, 0.0);
  const std::vector<double> numeric = [&] {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(rm.dense(), false);
    std::vector<double> phases;
    for (Eigen::Index j = 0; j < solver.eigenvalues().size(); ++j)
      phases.push_back(std::arg(solver.eigenvalues()(j)));
    std::sort(phases.begin(), phases.end());
    return phases;
  }();
  std::vector<double> analytic = rm.phases;
  std::sort(analytic.begin(), analytic.end());
  REQUIRE(numeric.size() == analytic.size());
  for (std::size_t j = 0; j < numeric.size(); ++j)
    CHECK(numeric[j] == Catch::Approx(analytic[j]).margin(1e-10));
}

TEST_CASE("eigendecomposition reconstructs the reduced operator") {
  const LatticeConfig cfg = LatticeConfig::centered(2, 7);
  const Eigen::MatrixXcd m = reduced_u_lambda(cfg, 1.0).dense();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, true);
  REQUIRE(solver.info() == Eigen::Success);
  const Eigen::MatrixXcd rebuilt =
      solver.eigenvectors() * solver.eigenvalues().asDiagonal() * solver.eigenvectors().inverse();
  CHECK((rebuilt - m).norm() < 1e-8);
}

TEST_CASE("avoided crossing at lambda = 1 (d=2, n=11)") {
  const LatticeConfig cfg = LatticeConfig::centered(2, 11);
  // computed once; Catch2 re-enters the test body for every leaf section
  static const ScanResult result = [&] {
    ScanOptions opt;
    opt.lambda_min = 0.8;
    opt.lambda_max = 1.2;
    opt.points = 41;
    return scan(cfg, opt);
  }();

  const std::size_t dim = reduced_dimension(cfg);
  REQUIRE(result.lambdas.size() == 41);
  for (const std::vector<double>& phases : result.eigenphases) {
    REQUIRE(phases.size() == dim);
    CHECK(std::is_sorted(phases.begin(), phases.end()));
    CHECK(phases.front() > -std::numbers::pi - 1e-12);
    CHECK(phases.back() <= std::numbers::pi + 1e-12);
  }

  SECTION("no branch crosses omega = 0 and the gap dips at the crossing") {
    std::vector<double> gaps;
    for (std::size_t j = 0; j < result.lambdas.size(); ++j) {
      const std::vector<double>& phases = result.eigenphases[j];
      // two eigenphases closest to zero
      double best1 = 1e9, best2 = 1e9;
      double signed1 = 0.0, signed2 = 0.0;
      for (double w : phases) {
        if (std::abs(w) < best1) {
          best2 = best1;
          signed2 = signed1;
          best1 = std::abs(w);
          signed1 = w;
        } else if (std::abs(w) < best2) {
          best2 = std::abs(w);
          signed2 = w;
        }
      }
      gaps.push_back(std::abs(signed1 - signed2));
      CHECK(best1 > 1e-4);  // avoidance: nothing reaches omega = 0
    }
    const std::size_t argmin =
        static_cast<std::size_t>(std::min_element(gaps.begin(), gaps.end()) - gaps.begin());
    const double lambda_at_min = result.lambdas[argmin];
    CHECK(lambda_at_min >= 0.95);
    CHECK(lambda_at_min <= 1.05);
  }

  SECTION("tracked branch curves are continuous and avoid omega = 0") {
    // |d omega / d lambda| <= pi, so along a tracked curve adjacent grid
    // values differ by at most pi * delta-lambda plus slack.
    const std::vector<std::vector<double>> branches = track_branches(result);
    const double step = result.lambdas[1] - result.lambdas[0];
    for (std::size_t j = 1; j < branches.size(); ++j) {
      double largest_jump = 0.0;
      for (std::size_t branch = 0; branch < dim; ++branch)
        largest_jump = std::max(largest_jump, circular_distance(branches[j][branch], branches[j - 1][branch]));
      CHECK(largest_jump < std::numbers::pi * step + 0.02);
    }
    // the two branches nearest zero at lambda = 1 never change sign
    const std::size_t at_unity = (result.lambdas.size() - 1) / 2;
    std::vector<std::size_t> nearest = {0, 1};
    {
      std::vector<std::size_t> order(dim);
      for (std::size_t b = 0; b < dim; ++b) order[b] = b;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(branches[at_unity][a]) < std::abs(branches[at_unity][b]);
      });
      nearest = {order[0], order[1]};
    }
    for (std::size_t branch : nearest) {
      const double sign = branches[at_unity][branch] > 0.0 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < branches.size(); ++j) CHECK(sign * branches[j][branch] > 0.0);
    }
  }

  SECTION("measured gap matches 4b/sqrt(N) and the crossing pair spans {phi_0, nu_1}") {
    const double b = b_from(inv_b2_exact(2, 11));
    const double model_gap = 4.0 * b / std::sqrt(121.0);
    CHECK(result.gap_at_crossing / model_gap > 0.9);
    CHECK(result.gap_at_crossing / model_gap < 1.1);
    CHECK(result.subspace_overlap >= 0.9);
    CHECK(result.subspace_overlap <= 1.0 + 1e-12);
  }
}

TEST_CASE("subspace overlap metric is gauge independent") {
  // The score compares spans, so re-phasing or re-mixing either frame by a
  // unitary must not change it. Checked on random 2-frames.
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  const Eigen::Index dim = 40;
  auto random_frame = [&] {
    Eigen::MatrixXcd f(dim, 2);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < 2; ++c) f(r, c) = Complex{gauss(rng), gauss(rng)};
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(f);
    return Eigen::MatrixXcd(qr.householderQ() * Eigen::MatrixXcd::Identity(dim, 2));
  };
  const Eigen::MatrixXcd q = random_frame();
  const Eigen::MatrixXcd w = random_frame();
  const double score = 0.5 * (q.adjoint() * w).squaredNorm();

  Eigen::Matrix2cd mix;  // a unitary 2x2: phases plus rotation
  const double angle = 0.7;
  mix << std::polar(1.0, 0.3) * std::cos(angle), -std::sin(angle), std::sin(angle),
      std::polar(1.0, -1.1) * std::cos(angle);
  Eigen::Matrix2cd fix = mix;
  const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(fix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix2cd unitary = svd.matrixU() * svd.matrixV().adjoint();

  const double rotated = 0.5 * (q.adjoint() * (w * unitary)).squaredNorm();
  CHECK(rotated == Catch::Approx(score).margin(1e-12));
  const double rephased = 0.5 * ((q * std::polar(1.0, 2.1)).adjoint() * w).squaredNorm();
  CHECK(rephased == Catch::Approx(score).margin(1e-12));
}

TEST_CASE("crossing overlap grows with n in three dimensions") {
  double prev = 0.0;
  for (int n : {5, 7, 9}) {
    const double overlap = crossing_subspace_overlap(LatticeConfig::centered(3, n));
    INFO("n=" << n << " overlap=" << overlap);
    CHECK(overlap > prev);
    prev = overlap;
  }
  CHECK(prev >= 0.99);
}

TEST_CASE("scan input validation") {
  CHECK_THROWS_AS(scan(LatticeConfig::centered(2, 4)), std::invalid_argument);  // even side
  ScanOptions tight;
  tight.max_dim = 100;
  CHECK_THROWS_AS(scan(LatticeConfig::centered(2, 11), tight), std::length_error);  // cap
  ScanOptions bad;
  bad.points = 1;
  CHECK_THROWS_AS(scan(LatticeConfig::centered(2, 5), bad), std::invalid_argument);
}

TEST_CASE("parallel and serial scans agree") {
  const LatticeConfig cfg = LatticeConfig::centered(2, 5);
  ScanOptions serial;
  serial.points = 9;
  serial.parallel = false;
  ScanOptions parallel = serial;
  parallel.parallel = true;
  const ScanResult a = scan(cfg, serial);
  const ScanResult b = scan(cfg, parallel);
  for (std::size_t j = 0; j < a.eigenphases.size(); ++j)
    for (std::size_t i = 0; i < a.eigenphases[j].size(); ++i)
      CHECK(a.eigenphases[j][i] == b.eigenphases[j][i]);
}
