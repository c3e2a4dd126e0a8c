#include <doctest.h>

#include <random>
#include <vector>

#include "properties.hpp"
#include "ptsym/contour.hpp"
#include "ptsym/determinant.hpp"

using namespace ptsym;

TEST_SUITE("determinant") {
  TEST_CASE("one-point operator") {
    const auto op = make_operator({{2.5, 0.75}}, 1.0);
    const cplx d = det_n(op, cplx{0.5, 0.25}).value();
    CHECK(d.real() == doctest::Approx(2.0));
    CHECK(d.imag() == doctest::Approx(0.5));
  }

  TEST_CASE("dense cofactor oracle, n <= 8") { CHECK(props::cofactor_max_rel_error(17, 2000) <= 1e-12); }

  TEST_CASE("folded PT evaluation matches the cofactor oracle") {
    for (std::size_t n : {2u, 3u, 6u, 7u, 8u}) {
      const auto op = build_hamiltonian({3.0, 0.0}, GridSpec{1.5, n, 0.0});
      for (double e : {-1.0, 0.3, 2.0}) {
        const cplx oracle = props::cofactor_det(props::dense_shifted(op, e));
        const cplx got = det_n(op, e).value();
        CHECK(std::abs(got - oracle) <= 1e-12 * std::abs(oracle));
        CHECK(std::abs(det_recurrence(op, e).value() - oracle) <= 1e-12 * std::abs(oracle));
      }
    }
  }

  TEST_CASE("real energies on PT grids give real determinants") {
    CHECK(props::determinant_reality(23, 100) <= 1e-10);
  }

  TEST_CASE("the unfolded recurrence agrees with the folded value on optimal lines") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> a(0.5, 4.5), b(-0.25, 0.5), x(6.0, 10.0), e(0.0, 20.0);
    std::uniform_int_distribution<std::size_t> n(20, 2000);
    for (int t = 0; t < 200; ++t) {
      const PotentialParams p{a(rng), b(rng)};
      const auto op = build_hamiltonian(p, GridSpec{x(rng), n(rng), optimal_shift(p, {2, 1}).y});
      const double en = e(rng);
      const auto folded = det_n(op, en);
      const auto full = det_recurrence(op, en);
      CHECK(full.imag_ratio() <= 1e-7);
      CHECK(full.real_sign() == folded.real_sign());
      CHECK(std::abs(full.log2_abs() - folded.log2_abs()) <= 1e-7);
    }
  }

  TEST_CASE("sign change at the alpha = 2 ground state") {
    const auto op = build_hamiltonian({2.0, 0.0}, GridSpec{8.0, 2000, 0.0});
    const double e0 = 1.2114109842;
    CHECK(det_n(op, e0 - 1e-4).real_sign() * det_n(op, e0 + 1e-4).real_sign() == -1);
  }

  TEST_CASE("mantissa normalization") {
    const auto op = build_hamiltonian({2.5, 0.0}, GridSpec{8.0, 3000, -0.2});
    for (double e : {0.0, 1.0, 10.0}) {
      const auto d = det_n(op, e);
      CHECK(std::abs(d.mantissa) >= 1.0);
      CHECK(std::abs(d.mantissa) < 2.0);
    }
  }

  TEST_CASE("serial and parallel scans are identical") {
    const auto op = build_hamiltonian({3.0, 0.0}, GridSpec{8.0, 3000, 0.0});
    std::vector<double> es;
    for (int k = 0; k < 500; ++k) es.push_back(-2.0 + 0.05 * k);
    const auto s = kernels::det_scan_serial(op, es);
    const auto p = kernels::det_scan_parallel(op, es);
    REQUIRE(s.size() == p.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s[i].mantissa == p[i].mantissa);
      CHECK(s[i].exponent == p[i].exponent);
    }
  }
}
