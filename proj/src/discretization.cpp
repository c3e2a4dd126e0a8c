#include "ptsym/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptsym/errors.hpp"

namespace ptsym {

void GridSpec::validate() const {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw DomainError("x_max must be positive");
  if (n < 1) throw DomainError("grid needs at least one interior point");
  if (!std::isfinite(y)) throw DomainError("contour shift must be finite");
}

double GridSpec::point(std::size_t k) const {
  const double h = step();
  // Mirror the left half so that point(n+1-k) == -point(k) bit for bit.
  if (2 * k > n + 1) return -point(n + 1 - k);
  if (2 * k == n + 1) return 0.0;
  return -x_max + static_cast<double>(k) * h;
}

double TridiagonalOperator::pt_asymmetry() const {
  double worst = 0.0;
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = diag[i];
    const cplx b = std::conj(diag[n - 1 - i]);
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    worst = std::max(worst, std::abs(a - b) / scale);
  }
  return worst;
}

TridiagonalOperator build_hamiltonian(const PotentialParams& params, const GridSpec& grid) {
  params.validate();
  grid.validate();
  const double h = grid.step();
  const double kinetic = 2.0 / (h * h);
  TridiagonalOperator op;
  op.grid = grid;
  op.off = -1.0 / (h * h);
  op.diag.resize(grid.n);
  const std::size_t n = grid.n;
  // k runs over the half with x_k >= 0 (1-based), then mirrors.
  for (std::size_t k = n; 2 * k >= n + 1; --k) {
    const cplx v = eval_potential(params, {grid.point(k), grid.y});
    op.diag[k - 1] = kinetic + v;
    op.diag[n - k] = std::conj(op.diag[k - 1]);
    // The center of an odd grid is its own mirror image, so PT needs it real.
    if (2 * k == n + 1) op.diag[k - 1] = op.diag[k - 1].real();
    if (k == 1) break;
  }
  op.pt_exact = true;
  return op;
}

TridiagonalOperator make_operator(std::vector<cplx> diag, double off) {
  if (diag.empty()) throw DomainError("operator needs at least one diagonal entry");
  TridiagonalOperator op;
  op.grid.n = diag.size();
  op.diag = std::move(diag);
  op.off = off;
  return op;
}

}  // namespace ptsym
