#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ptsym {

using cplx = std::complex<double>;

// Exponents of V(z) = -(i sinh z)^alpha cosh^beta z.
struct PotentialParams {
  double alpha = 2.0;
  double beta = 0.0;

  // Throws DomainError unless alpha >= 0 and alpha + beta > 0.
  void validate() const;
  double total() const { return alpha + beta; }
};

struct ComplexSample {
  cplx z;
  cplx v;
};

// Branch-correct potential on the strip around the real axis.
//
// For Re z >= 0 the powers are taken with arguments continued from the
// positive real axis along the vertical segment Im z: 0 -> y, so on x > 0 the
// value is exp(i pi (2+alpha)/2) sinh^alpha x cosh^beta x. For Re z < 0 the
// value is fixed by PT reflection, V(z) = conj(V(-conj z)), which realizes the
// branch below the cut on the negative axis. z = 0 returns 0 for alpha > 0.
cplx eval_potential(const PotentialParams& params, cplx z);

// Sign pattern (sign Re V, sign Im V) for x > 0; each entry is -1, 0 or +1.
struct SignPair {
  int re;
  int im;
  bool operator==(const SignPair&) const = default;
};
SignPair table1_signs(double alpha);

// V(x + i y) sampled on strictly increasing xs.
std::vector<ComplexSample> effective_potential(const PotentialParams& params, double y,
                                               std::span<const double> xs);

}  // namespace ptsym
