#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ptsym/contour.hpp"
#include "ptsym/determinant.hpp"
#include "ptsym/discretization.hpp"

namespace ptsym {

enum class Execution { serial, parallel };

struct ScanOptions {
  double scan_step = 0.05;
  double rel_tol = 1e-12;
  Execution execution = Execution::parallel;
};

// Real roots of det(H - E) in [e_min, e_max]: every sign change of Re det on
// the scan lattice, refined by bisection. Ascending.
std::vector<double> find_real_eigenvalues(const TridiagonalOperator& op, double e_min, double e_max,
                                          const ScanOptions& options = {});

// Bisection of Re det on a bracket whose endpoints have opposite signs.
double bisect_root(const TridiagonalOperator& op, double lo, double hi, double rel_tol = 1e-12);

// Grid choice shared by single solves and sweeps. When y_override is unset the
// contour shift comes from optimal_shift for the family.
struct GridPolicy {
  double x_max = 8.0;
  std::size_t n = 4000;
  std::optional<double> y_override;
};

GridSpec grid_for(const PotentialParams& params, const FamilySelector& family, const GridPolicy& policy);
TridiagonalOperator operator_for(const PotentialParams& params, const FamilySelector& family,
                                 const GridPolicy& policy);

// Inverse mode: the alpha in alpha_bracket at which E is an eigenvalue,
// beta fixed by params_template. Throws NumericalError without a sign change.
double solve_alpha_for_energy(const PotentialParams& params_template, const FamilySelector& family,
                              const GridPolicy& policy, double e, std::pair<double, double> alpha_bracket,
                              double tol = 1e-10);

struct WaveFunction {
  GridSpec grid;
  std::vector<cplx> values;
  double energy = 0.0;
  int iterations = 0;

  // -i psi'(z0)/psi(z0) at the grid center z0 = i y by central differences;
  // equals f0 of the Riccati expansion in q = -i x.
  cplx log_derivative_at_center() const;
  // max |Re psi(x) - Re psi(-x)| and |Im psi(x) + Im psi(-x)| over the peak.
  double parity_defect() const;
  // Sign of Im psi at the first grid point right of the center.
  int imag_sign_right_of_center() const;
};

// Inverse iteration at a (near-)root E; normalized to sum |psi|^2 h = 1 and
// phase-fixed so Re psi is even and Im psi odd.
WaveFunction eigenvector(const TridiagonalOperator& op, double e, int max_iterations = 50);

// Richardson estimate from eigenvalues at step h and h/2 (error ~ h^2).
inline double richardson(double coarse, double fine) { return fine + (fine - coarse) / 3.0; }

// A root on the n grid confirmed by a root on the n/2 grid (same x_max and
// contour) within h_coarse^2 (1 + E^2) + 1e-6. est_error is the Richardson
// estimate |fine - coarse| / 3.
struct ConfirmedLevel {
  double energy = 0.0;
  double coarse = 0.0;
  double est_error = 0.0;
};

std::vector<ConfirmedLevel> confirmed_real_eigenvalues(const PotentialParams& params, const FamilySelector& family,
                                                       const GridPolicy& policy, double e_min, double e_max,
                                                       const ScanOptions& options = {});

// Sensible half-width for the family: at least 8 and large enough that the
// asymptotic decay exponent |Re G| on the chosen line exceeds 30.
double default_x_max(const PotentialParams& params, const FamilySelector& family, double y);

}  // namespace ptsym
