#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <mutex>
#include <optional>
#include <vector>

#include "ptsym/potential.hpp"

namespace ptsym::rpm {

using real = boost::multiprecision::mpfr_float;
using rational = boost::multiprecision::mpq_rational;

enum class Kind { symmetric, nonsymmetric };
enum class Transform { iq, u };

// Holds the default mpfr precision for the lifetime of a solve. The Boost
// default precision is process-global, so scopes are serialized.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  std::unique_lock<std::recursive_mutex> lock_;
  unsigned saved_;
};

// Potential series v_j is stored by power: series[j] multiplies t^j.
// Symmetric problems carry zeros on odd powers.
// energy_sign maps the reported energy E to the recurrence parameter
// epsilon = energy_sign * E.
struct RpmProblem {
  Kind kind = Kind::symmetric;
  std::vector<rational> series;
  unsigned precision = 60;
  int hankel_dim = 2;
  int shift_d = 1;
  int s = 0;
  int energy_sign = -1;

  void validate() const;
  // Number of Riccati coefficients the Hankel construction needs.
  std::size_t coefficients_needed() const;
  // Series terms (by power) needed to produce them.
  std::size_t series_needed() const;
};

struct RpmResult {
  real energy;
  std::optional<real> f0;
  int converged_digits = 0;
  int iterations = 0;
};

// Truncated power series product, both inputs and output indexed by power.
std::vector<rational> series_multiply(const std::vector<rational>& a, const std::vector<rational>& b,
                    std::size_t terms);
std::vector<rational> series_power(const std::vector<rational>& a, int exponent, std::size_t terms);

// [-sin q]^alpha cos^beta q about q = 0.
RpmProblem transform_iq(const PotentialParams& params, std::size_t terms = 72);
// [-cos u]^alpha about u = 0 (beta must be zero).
RpmProblem transform_u(const PotentialParams& params, std::size_t terms = 72);

// Symmetric: f(t) = sum f_j t^{2j+1}, (2n+1+2s) f_n = v_n - eps d_{n0} - sum f_k f_{n-1-k}.
// Nonsymmetric: f(t) = sum f_j t^j, (n+1) f_{n+1} = sum f_k f_{n-k} - v_n + eps d_{n0}.
std::vector<real> riccati_coefficients(const RpmProblem& problem, const real& eps, const real& f0,
                     std::size_t order);

// Fraction-free elimination with row pivoting; square row-major input.
real bareiss_determinant(std::vector<real> m, std::size_t dim);

// det[f_{stride*(i+j)+offset}], i,j = 0..dim-1.
real hankel_det(const std::vector<real>& f, int dim, int offset, int stride = 1);

// Hankel condition(s) at (E, f0). Symmetric returns one value, nonsymmetric two.
std::vector<real> hankel_conditions(const RpmProblem& problem, const real& energy, const real& f0);

RpmResult hankel_root(const RpmProblem& problem, double seed_e, std::optional<double> seed_f0 = std::nullopt);

struct ConvergenceRow {
  int dim;
  std::optional<RpmResult> result;
};

// tolerance is the absolute uncertainty of the seed energy. Candidates are
// ranked by energy distance to the seed until two successive D agree within
// it, and to the previous-D root afterwards.
struct Seeds {
  double energy;
  std::optional<double> f0;
  double tolerance = 1e-6;
};

// Chained solves over D = d_min..d_max. A missing row is a no-convergence marker.
std::vector<ConvergenceRow> convergence_table(RpmProblem problem, int d_min, int d_max, Seeds seeds);

// Count of leading decimal digits shared by a and b.
int stable_digits(const real& a, const real& b);

std::string to_string(const real& x, int digits);

}  // namespace ptsym::rpm
