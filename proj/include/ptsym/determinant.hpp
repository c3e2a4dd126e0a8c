#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ptsym/discretization.hpp"

namespace ptsym {

// det(H - E) as mantissa * 2^exponent with 1 <= |mantissa| < 2.
struct ScaledDeterminant {
  cplx mantissa{1.0, 0.0};
  std::int64_t exponent = 0;

  // Sign of the real part; the scale factor is positive so this is the sign
  // of Re det itself.
  int real_sign() const { return (mantissa.real() > 0.0) - (mantissa.real() < 0.0); }
  // |Im| / |value|; small for real E on a PT-symmetric grid.
  double imag_ratio() const;
  bool is_real(double tol = 1e-10) const { return imag_ratio() <= tol; }
  double log2_abs() const;
  // Unscaled value; overflows to inf for very large exponents.
  cplx value() const;
};

// Three-term recurrence D_k = D_{k-1} (H_kk - E) - H_{k,k-1}^2 D_{k-2},
// D_0 = 1, renormalized by powers of two as it runs.
ScaledDeterminant det_recurrence(const TridiagonalOperator& op, cplx e);

// det(H - E). For an exactly PT-symmetric operator and real E the recurrence
// runs over the left half only: the right-half minors are the conjugates of
// the left ones, so det = |L_m|^2 - b^2 |L_{m-1}|^2 (n = 2m) or
// c |L_m|^2 - 2 b^2 Re(L_m conj L_{m-1}) (n = 2m+1, c the center entry),
// real by construction. Otherwise the full recurrence.
ScaledDeterminant det_n(const TridiagonalOperator& op, cplx e);
inline ScaledDeterminant det_n(const TridiagonalOperator& op, double e) { return det_n(op, cplx{e, 0.0}); }

// Data-parallel evaluation of det(H - E_j) over a list of energies. The
// serial version is the reference the OpenMP one is tested against.
namespace kernels {
std::vector<ScaledDeterminant> det_scan_serial(const TridiagonalOperator& op, std::span<const double> energies);
std::vector<ScaledDeterminant> det_scan_parallel(const TridiagonalOperator& op, std::span<const double> energies);
}  // namespace kernels

}  // namespace ptsym
