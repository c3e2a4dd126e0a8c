#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ptsym/errors.hpp"
#include "ptsym/potential.hpp"

using namespace ptsym;
using std::numbers::pi;

namespace {

int sign_of(double v, double scale) { return std::abs(v) <= 1e-12 * scale ? 0 : (v > 0) - (v < 0); }

// Continues arg(w(t)) along the vertical segment z = x + i t y, t: 0 -> 1,
// starting from arg0 on the real axis.
double continued_arg(cplx (*w)(cplx), double x, double y, double arg0) {
  double arg = arg0;
  cplx last = w({x, 0.0});
  for (int k = 1; k <= 2000; ++k) {
    const cplx now = w({x, y * k / 2000.0});
    arg += std::arg(now / last);
    last = now;
  }
  return arg;
}

}  // namespace

TEST_SUITE("potential") {
  TEST_CASE("real-axis examples") {
    const cplx a2 = eval_potential({2.0, 0.0}, {1.0, 0.0});
    CHECK(a2.real() == doctest::Approx(std::sinh(1.0) * std::sinh(1.0)).epsilon(1e-14));
    CHECK(std::abs(a2.imag()) < 1e-14);

    const cplx a0 = eval_potential({0.0, 1.0}, {1.0, 0.0});
    CHECK(a0.real() == doctest::Approx(-std::cosh(1.0)).epsilon(1e-14));
    CHECK(std::abs(a0.imag()) < 1e-14);

    const cplx a1 = eval_potential({1.0, 0.0}, {1.0, 0.0});
    CHECK(std::abs(a1.real()) < 1e-14);
    CHECK(a1.imag() == doctest::Approx(-std::sinh(1.0)).epsilon(1e-14));
  }

  TEST_CASE("continued branch off the axis matches phase tracking") {
    const double x = 0.5, y = -0.2;
    auto isinh = [](cplx z) { return cplx{0.0, 1.0} * std::sinh(z); };
    auto cosh_ = [](cplx z) { return std::cosh(z); };
    const cplx z{x, y};
    for (const PotentialParams p : {PotentialParams{3.0, 0.0}, PotentialParams{2.5, 0.5}, PotentialParams{1.3, -0.2}}) {
      const double arg_s = continued_arg(isinh, x, y, pi / 2);
      const double arg_c = continued_arg(cosh_, x, y, 0.0);
      const cplx oracle = -std::exp(p.alpha * cplx{std::log(std::abs(isinh(z))), arg_s} +
                                    p.beta * cplx{std::log(std::abs(cosh_(z))), arg_c});
      const cplx v = eval_potential(p, z);
      CHECK(std::abs(v - oracle) <= 1e-12 * std::abs(oracle));
    }
  }

  TEST_CASE("PT pairing V(-conj z) = conj V(z)") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> a(0.0, 8.0), b(-0.5, 1.0), x(0.05, 4.0), y(-1.5, 1.5);
    for (int t = 0; t < 500; ++t) {
      PotentialParams p{a(rng), b(rng)};
      if (p.total() <= 0.0) continue;
      const cplx z{x(rng), y(rng)};
      const cplx v = eval_potential(p, z);
      const cplx w = eval_potential(p, -std::conj(z));
      CHECK(std::abs(w - std::conj(v)) <= 1e-13 * std::abs(v));
    }
  }

  TEST_CASE("real-axis phase is pi (2 + alpha) / 2") {
    for (double alpha = 0.25; alpha <= 8.0; alpha += 0.25) {
      const cplx v = eval_potential({alpha, 0.3}, {1.3, 0.0});
      const double expected = pi * (2.0 + alpha) / 2.0;
      const double diff = std::remainder(std::arg(v) - expected, 2.0 * pi);
      CHECK(std::abs(diff) < 1e-12);
    }
  }

  TEST_CASE("sign table examples and consistency on a 0.25 grid") {
    CHECK(table1_signs(2.5) == SignPair{1, 1});
    CHECK(table1_signs(4.0) == SignPair{-1, 0});
    CHECK(table1_signs(6.5) == SignPair{1, 1});
    CHECK(table1_signs(1.0) == SignPair{0, -1});
    for (double alpha = 0.0; alpha <= 8.0; alpha += 0.25) {
      PotentialParams p{alpha, alpha == 0.0 ? 1.0 : 0.0};
      const cplx v = eval_potential(p, {1.0, 0.0});
      const double s = std::abs(v);
      CAPTURE(alpha);
      CHECK(table1_signs(alpha) == SignPair{sign_of(v.real(), s), sign_of(v.imag(), s)});
    }
  }

  TEST_CASE("effective potential samples") {
    std::vector<double> xs;
    for (int k = -30; k <= 30; ++k) xs.push_back(0.1 * k);

    for (const auto& s : effective_potential({2.0, 0.0}, 0.0, xs)) {
      CHECK(std::abs(s.v.imag()) < 1e-12);
      CHECK(s.v.real() == doctest::Approx(std::sinh(s.z.real()) * std::sinh(s.z.real())).epsilon(1e-12));
    }

    const auto odd = effective_potential({3.0, 0.0}, -pi / 6, xs);
    for (std::size_t i = 0; i < odd.size(); ++i) {
      const auto& l = odd[i];
      const auto& r = odd[odd.size() - 1 - i];
      const double scale = std::max(1.0, std::abs(l.v));
      CHECK(std::abs(l.v.real() - r.v.real()) <= 1e-12 * scale);
      CHECK(std::abs(l.v.imag() + r.v.imag()) <= 1e-12 * scale);
    }

    // Real negative on the axis, confining on the shifted line.
    CHECK(eval_potential({4.0, 0.0}, {2.0, 0.0}).real() < 0.0);
    for (const auto& s : effective_potential({4.0, 0.0}, -pi / 4, xs))
      if (std::abs(s.z.real()) >= 1.5) CHECK(s.v.real() > std::abs(s.v.imag()));
  }

  TEST_CASE("parameter and grid validation") {
    CHECK_THROWS_AS(PotentialParams({-0.5, 1.0}).validate(), DomainError);
    CHECK_THROWS_AS(PotentialParams({0.0, 0.0}).validate(), DomainError);
    CHECK_THROWS_AS(PotentialParams({1.0, -1.0}).validate(), DomainError);
    const std::vector<double> bad{0.0, 1.0, 1.0};
    CHECK_THROWS_AS(effective_potential({2.0, 0.0}, 0.0, bad), DomainError);
    CHECK(eval_potential({2.0, 0.0}, {0.0, 0.0}) == cplx{0.0, 0.0});
  }
}
