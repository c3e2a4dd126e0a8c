#pragma once

#include "ptsym/potential.hpp"

namespace ptsym {

// Which eigenvalue family a computation follows: the branches continuously
// connected to the real confining case alpha = alpha_ref (2, 6, 10, ...).
// branch_sign = +1 takes the family's principal anti-Stokes line,
// branch_sign = -1 the alternative line used to continue alpha_ref >= 6
// families below alpha = alpha_ref - 2.
struct FamilySelector {
  int alpha_ref = 2;
  int branch_sign = +1;

  void validate() const;
  bool operator==(const FamilySelector&) const = default;
};

// Integration line z = x + i y with its admissible window [y_minus, y_plus].
struct ContourSpec {
  double y = 0.0;
  double y_plus = 0.0;
  double y_minus = 0.0;
  double theta = 0.0;  // asymptotic phase of G on this line
};

// theta = pi (alpha + 2)/4 + y (alpha + beta)/2.
double asymptotic_phase(const PotentialParams& params, double y);

// Anti-Stokes line of the family and its convergence window. The returned
// shift never lies above the real axis: a positive optimum is clamped to 0
// and the window is then truncated at 0. Throws DomainError if the window lies
// entirely above the real axis.
ContourSpec optimal_shift(const PotentialParams& params, const FamilySelector& family);

// Unclamped optimum of the family (the continuous line of the contour plot).
double unclamped_optimal_shift(const PotentialParams& params, const FamilySelector& family);

// Leading asymptotic exponent G(x) of psi = exp(G) for large positive x. The
// sign is the one that decays on the family's optimal line.
cplx asymptotic_g(const PotentialParams& params, const FamilySelector& family, double x);

// G evaluated on the shifted line, G(x + i y), using the same leading term.
cplx asymptotic_g_shifted(const PotentialParams& params, const FamilySelector& family, double x,
                          double y);

}  // namespace ptsym
