#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ptsym/contour.hpp"
#include "ptsym/errors.hpp"

using namespace ptsym;
using std::numbers::pi;

TEST_SUITE("contour") {
  TEST_CASE("asymptotic phase examples") {
    CHECK(asymptotic_phase({2.0, 0.0}, 0.0) == doctest::Approx(pi).epsilon(1e-14));
    CHECK(asymptotic_phase({4.0, 0.0}, -pi / 4) == doctest::Approx(pi).epsilon(1e-14));
    CHECK(asymptotic_phase({3.0, 1.0}, -pi / 8) == doctest::Approx(pi).epsilon(1e-14));
  }

  TEST_CASE("optimal shift examples") {
    const auto c2 = optimal_shift({2.0, 0.0}, {2, 1});
    CHECK(c2.y == doctest::Approx(0.0));
    CHECK(c2.y_plus == doctest::Approx(pi / 2));
    CHECK(c2.y_minus == doctest::Approx(-pi / 2));

    const auto c4 = optimal_shift({4.0, 0.0}, {2, 1});
    CHECK(c4.y == doctest::Approx(-pi / 4));
    CHECK(c4.y_plus == doctest::Approx(0.0));
    CHECK(c4.y_minus == doctest::Approx(-pi / 2));

    CHECK(optimal_shift({10.0, 0.0}, {2, 1}).y == doctest::Approx(-0.4 * pi));
    CHECK(optimal_shift({1e7, 0.0}, {2, 1}).y == doctest::Approx(-pi / 2).epsilon(1e-6));
  }

  TEST_CASE("a positive optimum is clamped to the real axis") {
    const auto c = optimal_shift({1.5, 0.0}, {2, 1});
    CHECK(unclamped_optimal_shift({1.5, 0.0}, {2, 1}) > 0.0);
    CHECK(c.y == 0.0);
    CHECK(c.y_plus == 0.0);
    CHECK(c.y_minus < 0.0);
  }

  TEST_CASE("window above the axis is rejected") {
    CHECK_THROWS_AS(optimal_shift({3.0, 0.0}, {6, 1}), DomainError);
    CHECK_THROWS_AS(FamilySelector({4, 1}).validate(), DomainError);
    CHECK_THROWS_AS(FamilySelector({2, 0}).validate(), DomainError);
  }

  TEST_CASE("the optimal line is an anti-Stokes line") {
    for (double beta : {-0.25, 0.0, 0.5}) {
      for (double alpha = 2.0; alpha <= 12.0; alpha += 0.1) {
        const PotentialParams p{alpha, beta};
        CHECK(asymptotic_phase(p, optimal_shift(p, {2, 1}).y) == doctest::Approx(pi).epsilon(1e-12));
      }
      // The family sign flips G, so the phase is 2 pi and G is again real negative.
      for (double alpha = 6.0; alpha <= 14.0; alpha += 0.1) {
        const PotentialParams p{alpha, beta};
        const double y = optimal_shift(p, {6, 1}).y;
        CHECK(asymptotic_phase(p, y) == doctest::Approx(2 * pi).epsilon(1e-12));
        const cplx g = asymptotic_g_shifted(p, {6, 1}, 4.0, y);
        CHECK(g.real() < 0.0);
        CHECK(std::abs(g.imag()) <= 1e-12 * std::abs(g));
      }
    }
  }

  TEST_CASE("window edges have phases 3 pi / 2 and pi / 2") {
    for (double alpha = 2.0; alpha <= 10.0; alpha += 0.25) {
      const PotentialParams p{alpha, 0.0};
      const auto c = optimal_shift(p, {2, 1});
      CHECK(asymptotic_phase(p, c.y_plus) == doctest::Approx(1.5 * pi).epsilon(1e-12));
      CHECK(asymptotic_phase(p, c.y_minus) == doctest::Approx(0.5 * pi).epsilon(1e-12));
    }
  }

  TEST_CASE("optimal shift is non-increasing in alpha") {
    for (double beta : {-0.25, 0.0, 0.25}) {
      double last = INFINITY;
      for (double alpha = 2.0; alpha <= 20.0; alpha += 0.05) {
        const double y = optimal_shift({alpha, beta}, {2, 1}).y;
        CHECK(y <= last + 1e-15);
        last = y;
      }
    }
  }

  TEST_CASE("asymptotic exponent") {
    const cplx g = asymptotic_g({2.0, 0.0}, {2, 1}, 3.0);
    CHECK(g.real() == doctest::Approx(-std::exp(3.0) / 2).epsilon(1e-12));
    CHECK(std::abs(g.imag()) < 1e-12 * std::abs(g));

    const cplx g4 = asymptotic_g_shifted({4.0, 0.0}, {2, 1}, 5.0, 0.0);
    CHECK(std::abs(g4.real()) < 1e-12 * std::abs(g4));

    for (double d : {0.1, 0.5, 1.0, 1.9}) CHECK(asymptotic_g({2.0 + d, 0.0}, {2, 1}, 5.0).real() < 0.0);
    CHECK(asymptotic_g({4.5, 0.0}, {2, 1}, 5.0).real() > 0.0);

    const auto c = optimal_shift({5.0, 0.0}, {2, 1});
    const cplx gs = asymptotic_g_shifted({5.0, 0.0}, {2, 1}, 6.0, c.y);
    CHECK(gs.real() < 0.0);
    CHECK(std::abs(gs.imag()) < 1e-10 * std::abs(gs));
  }
}
