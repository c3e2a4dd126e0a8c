#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "properties.hpp"
#include "ptsym/errors.hpp"
#include "ptsym/spectral.hpp"

using namespace ptsym;

TEST_SUITE("spectral") {
  TEST_CASE("alpha = 2 levels match a Hermitian eigensolver on the same grid") {
    const auto op = build_hamiltonian({2.0, 0.0}, GridSpec{8.0, 800, 0.0});
    Eigen::VectorXd diag(static_cast<Eigen::Index>(op.size()));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(op.size() - 1));
    for (std::size_t i = 0; i < op.size(); ++i) diag[static_cast<Eigen::Index>(i)] = op.diag[i].real();
    sub.setConstant(op.off);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const auto roots = find_real_eigenvalues(op, 0.0, 20.0);
    REQUIRE(roots.size() >= 3);
    for (int k = 0; k < 3; ++k) CHECK(roots[static_cast<std::size_t>(k)] == doctest::Approx(es.eigenvalues()[k]).epsilon(1e-9));
  }

  TEST_CASE("alpha = 4: nothing on the real axis, a continued level on the optimal line") {
    const GridPolicy axis{8.0, 2000, 0.0};
    CHECK(confirmed_real_eigenvalues({4.0, 0.0}, {2, 1}, axis, 0.0, 10.0).empty());

    const PotentialParams p{4.0, 0.0};
    const double y = optimal_shift(p, {2, 1}).y;
    CHECK(y == doctest::Approx(-std::numbers::pi / 4));
    const GridPolicy line{default_x_max(p, {2, 1}, y), 2000, std::nullopt};
    const auto levels = confirmed_real_eigenvalues(p, {2, 1}, line, 0.0, 10.0);
    REQUIRE_FALSE(levels.empty());
    CHECK(levels.front().energy == doctest::Approx(1.5459).epsilon(1e-3));
  }

  TEST_CASE("inverse mode recovers alpha") {
    const GridPolicy g{8.0, 1000, std::nullopt};
    const auto at2 = find_real_eigenvalues(operator_for({2.0, 0.0}, {2, 1}, g), 0.0, 2.0);
    REQUIRE_FALSE(at2.empty());
    CHECK(solve_alpha_for_energy({2.0, 0.0}, {2, 1}, g, at2.front(), {1.9, 2.1}) == doctest::Approx(2.0).epsilon(1e-6));

    const auto at3 = find_real_eigenvalues(operator_for({3.0, 0.0}, {2, 1}, g), 0.0, 2.0);
    REQUIRE_FALSE(at3.empty());
    CHECK(solve_alpha_for_energy({3.0, 0.0}, {2, 1}, g, at3.front(), {2.8, 3.2}) == doctest::Approx(3.0).epsilon(1e-6));

    CHECK_THROWS_AS(solve_alpha_for_energy({2.0, 0.0}, {2, 1}, g, 50.0, {1.99, 2.01}), NumericalError);
  }

  TEST_CASE("ground states: parity and log-derivative at the center") {
    CHECK(props::ground_state_parity_defect() <= 1e-6);

    const auto op2 = build_hamiltonian({2.0, 0.0}, GridSpec{8.0, 2000, 0.0});
    const auto wf2 = eigenvector(op2, find_real_eigenvalues(op2, 0.0, 2.0).front());
    double peak = 0.0, imag = 0.0;
    for (const auto& v : wf2.values) {
      peak = std::max(peak, std::abs(v));
      imag = std::max(imag, std::abs(v.imag()));
    }
    CHECK(imag <= 1e-8 * peak);
    CHECK(std::abs(wf2.log_derivative_at_center()) <= 1e-6);

    for (const auto& [alpha, e, ld] : {std::tuple{1.0, 1.76515725, 1.09513737}, std::tuple{3.0, 1.35014099, -0.47715200}}) {
      const auto op = build_hamiltonian({alpha, 0.0}, GridSpec{8.0, 4000, 0.0});
      const auto roots = find_real_eigenvalues(op, 0.0, 2.0);
      REQUIRE_FALSE(roots.empty());
      CHECK(roots.front() == doctest::Approx(e).epsilon(1e-5));
      const cplx d = eigenvector(op, roots.front()).log_derivative_at_center();
      CHECK(d.real() == doctest::Approx(ld).epsilon(1e-3));
      CHECK(std::abs(d.imag()) <= 1e-6);
    }
  }

  TEST_CASE("second-order convergence") {
    const double order = props::fd_convergence_order();
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
  }

  TEST_CASE("confirmed levels carry a Richardson error estimate") {
    const auto levels = confirmed_real_eigenvalues({2.0, 0.0}, {2, 1}, GridPolicy{8.0, 4000, std::nullopt}, 0.0, 10.0);
    REQUIRE(levels.size() >= 3);
    CHECK(levels.front().est_error < 1e-5);
    CHECK(richardson(levels.front().coarse, levels.front().energy) == doctest::Approx(1.21141098417527).epsilon(1e-8));
  }

  TEST_CASE("serial and parallel root finding agree") {
    const auto op = build_hamiltonian({3.0, 0.0}, GridSpec{8.0, 2000, 0.0});
    ScanOptions s;
    s.execution = Execution::serial;
    ScanOptions p;
    p.execution = Execution::parallel;
    CHECK(find_real_eigenvalues(op, -2.0, 20.0, s) == find_real_eigenvalues(op, -2.0, 20.0, p));
  }

  TEST_CASE("default half-width") {
    CHECK(default_x_max({2.0, 0.0}, {2, 1}, 0.0) >= 8.0);
    CHECK(default_x_max({4.0, 0.0}, {2, 1}, -std::numbers::pi / 4) <= 12.0);
  }
}
