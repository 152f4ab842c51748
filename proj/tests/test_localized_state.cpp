#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qwsearch/qwsearch.hpp"

using namespace qwsearch;

TEST_CASE("exact normalisation sums") {
  SECTION("d=2, n=3 toy lattice gives exactly 16/9") {
    const NormResult norm = inv_b2_exact(2, 3);
    CHECK(std::abs(norm.inv_b2 - 16.0 / 9.0) < 1e-14);
    CHECK(b_from(norm) == Catch::Approx(0.75).margin(1e-14));
  }
  SECTION("d=1 closed forms (testing only)") {
    // d=1, n=2 is the degenerate single-mode case: one term 1/(1 - cos pi)
    // with prefactor 2d/N = 1 gives 1/2.
    CHECK(inv_b2_exact(1, 2).inv_b2 == Catch::Approx(0.5).margin(1e-15));
    // d=1 odd n: (2/n) * (n^2-1)/6.
    CHECK(inv_b2_exact(1, 3).inv_b2 == Catch::Approx(8.0 / 9.0).margin(1e-14));
    CHECK(inv_b2_exact(1, 11).inv_b2 == Catch::Approx(2.0 * 120.0 / (6.0 * 11.0)).margin(1e-12));
  }
  SECTION("regrouped edge/face sum equals the direct sum") {
    for (int d : {2, 3}) {
      for (int n : {3, 5, 7, 11}) {
        const double direct = inv_b2_exact(d, n).inv_b2;
        const double regrouped = inv_b2_exact_regrouped(d, n);
        INFO("d=" << d << " n=" << n);
        CHECK(std::abs(direct - regrouped) < 1e-10);
      }
    }
  }
  SECTION("breakdown terms sum to the total") {
    const NormResult norm = inv_b2_exact(3, 7);
    REQUIRE(norm.breakdown.size() == 3);
    double total = 0.0;
    for (const NormTerm& t : norm.breakdown) total += t.term;
    CHECK(total == Catch::Approx(norm.inv_b2).margin(1e-12));
    CHECK(norm.breakdown[0].binomial == 3.0);
    CHECK(norm.breakdown[1].binomial == 3.0);
    CHECK(norm.breakdown[2].binomial == 1.0);
  }
  SECTION("d=2 sum grows with n, d=3 sum converges") {
    double prev = 0.0;
    for (int n : {5, 7, 11, 15, 21}) {
      const double value = inv_b2_exact(2, n).inv_b2;
      CHECK(value > prev);
      prev = value;
    }
    double prev_diff = 1e9;
    prev = inv_b2_exact(3, 5).inv_b2;
    for (int n : {7, 9, 11, 13}) {
      const double value = inv_b2_exact(3, n).inv_b2;
      const double diff = std::abs(value - prev);
      CHECK(diff < prev_diff);
      prev_diff = diff;
      prev = value;
    }
  }
  SECTION("normalisation is at least one on search lattices") {
    for (int d : {2, 3}) {
      for (int n : {3, 5, 11}) CHECK(inv_b2_exact(d, n).inv_b2 >= 1.0);
    }
  }
  SECTION("oversized sums are rejected") { CHECK_THROWS_AS(inv_b2_exact(6, 100), std::length_error); }
}

TEST_CASE("consistency sum evaluates to 1 - 1/N") {
  for (auto [d, n] : {std::pair{2, 3}, {2, 11}, {3, 5}}) {
    const double N = std::pow(static_cast<double>(n), d);
    INFO("d=" << d << " n=" << n);
    CHECK(std::abs(consistency_sum(d, n) - (1.0 - 1.0 / N)) < 1e-12);
  }
}

TEST_CASE("localised state identities") {
  for (auto [d, n] : {std::pair{2, 11}, {3, 5}}) {
    const LatticeConfig cfg = LatticeConfig::centered(d, n);
    const double N = static_cast<double>(cfg.vertex_count());
    const NuState nu = nu_coefficients(cfg);
    INFO("d=" << d << " n=" << n);

    // b from mode-coefficient normalisation vs the direct lattice sum
    CHECK(std::abs(nu.b - 1.0 / std::sqrt(inv_b2_exact(d, n).inv_b2)) < 1e-10);

    const StateVector full = nu.assemble();
    CHECK(std::abs(state_norm(full) - 1.0) < 1e-12);
    CHECK(nu.reduced_coefficients()[0] == Complex{0.0, 0.0});
    CHECK(std::abs(inner_product(make_phi0(cfg), full)) < 1e-12);

    // <sv|nu_1> = b (1 - 1/N), real and positive
    const Complex sv_overlap_value = inner_product(make_sv(cfg), full);
    CHECK(std::abs(sv_overlap_value.real() - nu.b * (1.0 - 1.0 / N)) < 1e-12);
    CHECK(std::abs(sv_overlap_value.imag()) < 1e-12);
    CHECK(sv_overlap_value.real() > 0.0);

    // ||U1 nu - nu + (2b(1-1/N)/sqrt(N)) phi0|| <= 3b/N
    const StateVector mapped = apply_u1(cfg, full);
    const StateVector phi0 = make_phi0(cfg);
    const double defect = 2.0 * nu.b * (1.0 - 1.0 / N) / std::sqrt(N);
    double residual2 = 0.0;
    for (std::size_t j = 0; j < full.size(); ++j)
      residual2 += std::norm(mapped[j] - full[j] + defect * phi0[j]);
    CHECK(std::sqrt(residual2) <= 3.0 * nu.b / N);

    // <nu_1|U0|sv> = -b (1 - 1/N), real and negative
    const Complex shifted_overlap = overlap_nu_u0sv(nu);
    CHECK(std::abs(shifted_overlap.real() + nu.b * (1.0 - 1.0 / N)) < 1e-10);
    CHECK(std::abs(shifted_overlap.imag()) < 1e-12);
  }
  CHECK_THROWS_AS(nu_coefficients(LatticeConfig::centered(2, 4)), std::invalid_argument);
}

TEST_CASE("I integrals by quadrature") {
  SECTION("I_1(11) equals cot(pi/22)") {
    const IntegralValue I1 = I_quadrature(1, 11);
    CHECK(std::abs(I1.value - 1.0 / std::tan(std::numbers::pi / 22.0)) < 1e-8);
    CHECK(I1.converged);
  }
  SECTION("I_2(101) matches the large-n expansion to O(1/n^2)") {
    const IntegralValue I2 = I_quadrature(2, 101);
    CHECK(std::abs(I2.value - I2_asymptotic(101)) < 1e-3);
  }
  SECTION("I_3 asymptote") {
    const IntegralValue I3 = I_quadrature_asymptotic(3);
    CHECK(std::abs(I3.value - 15.672) < 0.02);
  }
  SECTION("divergent limits and order caps are rejected") {
    CHECK_THROWS_AS(I_quadrature_asymptotic(1), std::invalid_argument);
    CHECK_THROWS_AS(I_quadrature_asymptotic(2), std::invalid_argument);
    CHECK_THROWS_AS(I_quadrature(0, 11), std::invalid_argument);
    CHECK_THROWS_AS(I_quadrature(7, 11), std::invalid_argument);
  }
}

TEST_CASE("asymptotic normalisation") {
  const double pi = std::numbers::pi;
  SECTION("d=2 closed form") {
    const NormResult norm = inv_b2_asymptotic(2, 31);
    const double expected =
        (2.0 / pi) * std::log(961.0) + (8.0 / (pi * pi)) * (2.0 - 0.9159655941772190) +
        (2.0 / pi) * std::log(8.0 / (pi * pi));
    CHECK(norm.inv_b2 == Catch::Approx(expected).margin(1e-12));
    CHECK(norm.inv_b2 == Catch::Approx(5.1).margin(0.05));
    REQUIRE(norm.breakdown.size() == 2);
    CHECK(norm.breakdown[0].term == Catch::Approx(16.0 / (pi * pi)).margin(1e-12));
  }
  SECTION("d=3 constant") {
    const NormResult norm = inv_b2_asymptotic(3, 21);
    CHECK(norm.inv_b2 == Catch::Approx(6.0 / std::pow(pi, 3) * 15.672).margin(0.01));
    // n-independent
    CHECK(inv_b2_asymptotic(3, 51).inv_b2 == norm.inv_b2);
  }
  SECTION("d=2 asymptotic-vs-exact gap shrinks with n") {
    double prev_gap = 1e9;
    for (int n : {11, 31, 51, 101}) {
      const double exact = inv_b2_exact(2, n).inv_b2;
      const double asym = inv_b2_asymptotic(2, n).inv_b2;
      const double gap = std::abs(asym - exact) / exact;
      INFO("n=" << n << " relative gap " << gap);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
  }
  SECTION("d >= 4 keeps the lower-order classes with n^{i-d} prefactors") {
    const NormResult n11 = inv_b2_asymptotic(4, 11);
    REQUIRE(n11.breakdown.size() == 4);
    CHECK(n11.inv_b2 > 0.0);
    // the lower classes fade, leaving the pure I_4 contribution
    const double floor4 = inv_b2_quadrature(4, 0).inv_b2;
    double prev = n11.inv_b2;
    for (int n : {31, 101}) {
      const double value = inv_b2_asymptotic(4, n).inv_b2;
      CHECK(value < prev);
      CHECK(value > floor4);
      prev = value;
    }
    CHECK(floor4 == Catch::Approx(2.4789).margin(0.01));
  }
  SECTION("d < 2 is rejected") {
    CHECK_THROWS_AS(inv_b2_asymptotic(1, 11), std::invalid_argument);
    CHECK_THROWS_AS(inv_b2_quadrature(1, 11), std::invalid_argument);
  }
}

TEST_CASE("quadrature-based normalisation") {
  SECTION("n -> infinity limit for d=3") {
    const NormResult norm = inv_b2_quadrature(3, 0);
    CHECK(norm.inv_b2 == Catch::Approx(6.0 / std::pow(std::numbers::pi, 3) * 15.672).margin(0.01));
  }
  SECTION("finite-n quadrature tracks the exact sum") {
    // The integrals approximate the lattice sums up to Poisson corrections;
    // a few percent at this size.
    const double quad = inv_b2_quadrature(3, 21).inv_b2;
    const double exact = inv_b2_exact(3, 21).inv_b2;
    CHECK(std::abs(quad - exact) / exact < 0.05);
  }
  SECTION("the d=2 limit diverges") {
    CHECK_THROWS_AS(inv_b2_quadrature(2, 0), std::invalid_argument);
  }
}
