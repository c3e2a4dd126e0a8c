#pragma once

#include <cstddef>
#include <vector>

#include "ptsym/potential.hpp"

namespace ptsym {

// Uniform grid of n interior points on [-x_max, x_max], lifted to Im z = y.
struct GridSpec {
  double x_max = 8.0;
  std::size_t n = 4000;
  double y = 0.0;

  void validate() const;
  double step() const { return 2.0 * x_max / static_cast<double>(n + 1); }
  // 1-based as in x_k = -x_max + k h; exact mirror images for k and n+1-k.
  double point(std::size_t k) const;
};

// Symmetric tridiagonal discretization of -d^2/dz^2 + V with Dirichlet ends.
struct TridiagonalOperator {
  std::vector<cplx> diag;  // 2/h^2 + V(x_k + i y)
  double off = 0.0;        // -1/h^2 on both off-diagonals
  GridSpec grid;
  // Set when diag[i] == conj(diag[n-1-i]) holds exactly by construction.
  bool pt_exact = false;

  std::size_t size() const { return diag.size(); }
  // Largest relative violation of diag[i] = conj(diag[n-1-i]) (0-based).
  double pt_asymmetry() const;
};

// Builds the operator; the right half of the diagonal is evaluated and the
// left half filled by conjugate reflection, so PT symmetry holds exactly.
TridiagonalOperator build_hamiltonian(const PotentialParams& params, const GridSpec& grid);

// Operator from explicit entries (no PT structure assumed). Used by tests and
// tools that exercise the determinant directly.
TridiagonalOperator make_operator(std::vector<cplx> diag, double off);

}  // namespace ptsym
