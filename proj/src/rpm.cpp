#include "ptsym/rpm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ptsym/errors.hpp"

namespace ptsym::rpm {

namespace {

std::recursive_mutex& precision_mutex() {
  static std::recursive_mutex m;
  return m;
}

constexpr int max_iterations = 200;

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

// sin t or cos t series with exact rational coefficients.
std::vector<rational> trig_series(bool cosine, std::size_t terms) {
  std::vector<rational> out(terms, rational(0));
  rational fact(1);
  for (std::size_t k = 0; k < terms; ++k) {
    if (k > 0) fact *= static_cast<long>(k);
    bool even = k % 2 == 0;
    if (even != cosine) continue;
    std::size_t half = cosine ? k / 2 : (k - 1) / 2;
    rational c = rational(1) / fact;
    out[k] = half % 2 == 0 ? c : rational(-c);
  }
  return out;
}

std::vector<rational> negate(std::vector<rational> v) {
  for (auto& c : v) c = -c;
  return v;
}

void require_integer_exponents(const PotentialParams& params) {
  params.validate();
  if (!is_integer(params.alpha) || !is_integer(params.beta) || params.beta < 0)
    throw DomainError("series transforms need non-negative integer alpha and beta");
}

real tolerance(unsigned precision) { return pow(real(10), -static_cast<long>(2 * precision / 3)); }

real fd_step(const real& x, unsigned precision) {
  real scale = max(real(1), real(abs(x)));
  return scale * pow(real(10), -static_cast<long>(precision / 3));
}

void check_finite(const real& v) {
  if (!boost::multiprecision::isfinite(v)) throw NumericalError("non-finite value in Hankel iteration");
}

// Newton with a multiplicity estimate m = round(g'^2 / (g'^2 - g g'')); the
// Hankel roots of exactly solvable problems are multiple. Attainable accuracy
// drops to about 1/m of the working digits, and the tolerance follows.
RpmResult solve_symmetric(const RpmProblem& p, const real& seed) {
  real e = seed;
  real dummy(0);
  real max_step = real(0.5) * max(real(1), real(abs(seed)));
  for (int it = 1; it <= max_iterations; ++it) {
    real g = hankel_conditions(p, e, dummy)[0];
    check_finite(g);
    if (g == 0) return RpmResult{e, std::nullopt, 0, it};
    real h = fd_step(e, p.precision);
    real gp = hankel_conditions(p, e + h, dummy)[0];
    real gm = hankel_conditions(p, e - h, dummy)[0];
    real slope = (gp - gm) / (2 * h);
    real curv = (gp - 2 * g + gm) / (h * h);
    if (slope == 0) throw NumericalError("zero derivative in Hankel Newton step");
    real denom = slope * slope - g * curv;
    long m = 1;
    if (denom > 0) m = std::clamp(static_cast<long>(std::lround(static_cast<double>(slope * slope / denom))), 1L, 32L);
    real step = -m * g / slope;
    check_finite(step);
    if (abs(step) > max_step) step = step > 0 ? max_step : real(-max_step);
    e += step;
    real tol = pow(real(10), -static_cast<long>(2 * p.precision / (3 * m)));
    if (abs(step) <= tol * max(real(1), real(abs(e)))) return RpmResult{e, std::nullopt, 0, it};
  }
  throw NumericalError("Hankel root did not converge in 200 iterations");
}

RpmResult solve_nonsymmetric(const RpmProblem& p, const real& seed_e, const real& seed_f0) {
  real e = seed_e, f0 = seed_f0;
  real tol = tolerance(p.precision);
  real max_step = real(0.5) * max(real(1), real(abs(seed_e)));
  for (int it = 1; it <= max_iterations; ++it) {
    auto g = hankel_conditions(p, e, f0);
    check_finite(g[0]);
    check_finite(g[1]);
    real he = fd_step(e, p.precision), hf = fd_step(f0, p.precision);
    auto ge_p = hankel_conditions(p, e + he, f0), ge_m = hankel_conditions(p, e - he, f0);
    auto gf_p = hankel_conditions(p, e, f0 + hf), gf_m = hankel_conditions(p, e, f0 - hf);
    real j00 = (ge_p[0] - ge_m[0]) / (2 * he), j01 = (gf_p[0] - gf_m[0]) / (2 * hf);
    real j10 = (ge_p[1] - ge_m[1]) / (2 * he), j11 = (gf_p[1] - gf_m[1]) / (2 * hf);
    real det = j00 * j11 - j01 * j10;
    real jscale = max(abs(j00 * j11), abs(j01 * j10));
    if (det == 0 || abs(det) <= jscale * pow(real(10), -static_cast<long>(p.precision / 2)))
      throw NumericalError("singular Jacobian in Hankel pair iteration");
    real de = -(j11 * g[0] - j01 * g[1]) / det;
    real df = -(j00 * g[1] - j10 * g[0]) / det;
    check_finite(de);
    check_finite(df);
    real norm = max(abs(de), abs(df));
    if (norm > max_step) {
      de *= max_step / norm;
      df *= max_step / norm;
    }
    e += de;
    f0 += df;
    real scale = max(real(1), max(real(abs(e)), real(abs(f0))));
    if (max(abs(de), abs(df)) <= tol * scale) return RpmResult{e, f0, 0, it};
  }
  throw NumericalError("Hankel pair did not converge in 200 iterations");
}

}  // namespace

PrecisionScope::PrecisionScope(unsigned digits)
  : lock_(precision_mutex()), saved_(real::default_precision()) {
  real::default_precision(digits);
}

PrecisionScope::~PrecisionScope() { real::default_precision(saved_); }

void RpmProblem::validate() const {
  if (precision < 60) throw DomainError("RPM precision must be at least 60 digits");
  if (hankel_dim < 1) throw DomainError("Hankel dimension must be positive");
  if (shift_d < 0) throw DomainError("Hankel shift must be non-negative");
  if (s < 0) throw DomainError("regularization index s must be non-negative");
  if (energy_sign != 1 && energy_sign != -1) throw DomainError("energy sign must be +1 or -1");
  if (kind == Kind::symmetric) {
    for (std::size_t j = 1; j < series.size(); j += 2)
      if (series[j] != 0) throw DomainError("symmetric problem needs an even potential series");
  } else if (s != 0) {
    throw DomainError("regularization index applies to symmetric problems only");
  }
  if (series.size() < series_needed())
    throw DomainError("potential series too short for the requested Hankel dimension");
}

std::size_t RpmProblem::coefficients_needed() const {
  std::size_t D = static_cast<std::size_t>(hankel_dim), d = static_cast<std::size_t>(shift_d);
  if (kind == Kind::symmetric) return 2 * D - 1 + d;
  return 4 * D - 2 + 2 * d;
}

std::size_t RpmProblem::series_needed() const {
  std::size_t c = coefficients_needed();
  if (kind == Kind::symmetric) return 2 * (c - 1) + 1;
  return std::max<std::size_t>(c - 1, 2 * static_cast<std::size_t>(hankel_dim));
}

std::vector<rational> series_multiply(const std::vector<rational>& a, const std::vector<rational>& b,
                    std::size_t terms) {
  std::vector<rational> out(terms, rational(0));
  for (std::size_t i = 0; i < std::min(a.size(), terms); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < terms; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<rational> series_power(const std::vector<rational>& a, int exponent, std::size_t terms) {
  if (exponent < 0) throw DomainError("negative series exponent");
  std::vector<rational> out(terms, rational(0));
  if (terms > 0) out[0] = 1;
  for (int k = 0; k < exponent; ++k) out = series_multiply(out, a, terms);
  return out;
}

RpmProblem transform_iq(const PotentialParams& params, std::size_t terms) {
  require_integer_exponents(params);
  int a = static_cast<int>(params.alpha), b = static_cast<int>(params.beta);
  auto v = series_multiply(series_power(negate(trig_series(false, terms)), a, terms),
               series_power(trig_series(true, terms), b, terms), terms);
  RpmProblem p;
  p.series = std::move(v);
  if (a % 2 == 0) {
    p.kind = Kind::symmetric;
    p.shift_d = 1;
  } else {
    p.kind = Kind::nonsymmetric;
    p.shift_d = 0;
  }
  p.energy_sign = -1;
  return p;
}

RpmProblem transform_u(const PotentialParams& params, std::size_t terms) {
  require_integer_exponents(params);
  if (params.beta != 0) throw DomainError("the u transform is defined for beta = 0 only");
  RpmProblem p;
  p.series = series_power(negate(trig_series(true, terms)), static_cast<int>(params.alpha), terms);
  p.kind = Kind::symmetric;
  p.shift_d = 1;
  p.energy_sign = -1;
  return p;
}

std::vector<real> riccati_coefficients(const RpmProblem& problem, const real& eps, const real& f0,
                     std::size_t order) {
  const auto& v = problem.series;
  std::vector<real> f;
  f.reserve(order);
  if (problem.kind == Kind::symmetric) {
    if (order > 0 && 2 * (order - 1) >= v.size()) throw DomainError("Riccati order exceeds series length");
    for (std::size_t n = 0; n < order; ++n) {
      real acc = real(v[2 * n]);
      if (n == 0) acc -= eps;
      for (std::size_t k = 0; k < n; ++k) acc -= f[k] * f[n - 1 - k];
      f.push_back(acc / static_cast<long>(2 * n + 1 + 2 * problem.s));
    }
    return f;
  }
  if (order > 1 && order - 2 >= v.size()) throw DomainError("Riccati order exceeds series length");
  if (order == 0) return f;
  f.push_back(f0);
  for (std::size_t n = 0; n + 1 < order; ++n) {
    real acc = -real(v[n]);
    if (n == 0) acc += eps;
    for (std::size_t k = 0; k <= n; ++k) acc += f[k] * f[n - k];
    f.push_back(acc / static_cast<long>(n + 1));
  }
  return f;
}

real bareiss_determinant(std::vector<real> m, std::size_t dim) {
  if (m.size() != dim * dim) throw DomainError("matrix size mismatch");
  if (dim == 0) return real(1);
  real sign(1), prev(1);
  for (std::size_t k = 0; k + 1 < dim; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < dim; ++r)
      if (abs(m[r * dim + k]) > abs(m[piv * dim + k])) piv = r;
    if (m[piv * dim + k] == 0) return real(0);
    if (piv != k) {
      for (std::size_t c = 0; c < dim; ++c) std::swap(m[k * dim + c], m[piv * dim + c]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < dim; ++i) {
      for (std::size_t j = k + 1; j < dim; ++j)
        m[i * dim + j] = (m[i * dim + j] * m[k * dim + k] - m[i * dim + k] * m[k * dim + j]) / prev;
    }
    prev = m[k * dim + k];
  }
  return sign * m[dim * dim - 1];
}

real hankel_det(const std::vector<real>& f, int dim, int offset, int stride) {
  std::size_t D = static_cast<std::size_t>(dim);
  std::size_t last = static_cast<std::size_t>(stride * 2 * (dim - 1) + offset);
  if (dim < 1 || offset < 0 || stride < 1 || last >= f.size())
    throw DomainError("not enough coefficients for the Hankel matrix");
  std::vector<real> m(D * D);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j)
      m[i * D + j] = f[static_cast<std::size_t>(stride) * (i + j) + static_cast<std::size_t>(offset)];
  return bareiss_determinant(std::move(m), D);
}

std::vector<real> hankel_conditions(const RpmProblem& problem, const real& energy, const real& f0) {
  real eps = problem.energy_sign * energy;
  auto f = riccati_coefficients(problem, eps, f0, problem.coefficients_needed());
  if (problem.kind == Kind::symmetric) return {hankel_det(f, problem.hankel_dim, problem.shift_d)};
  return {hankel_det(f, problem.hankel_dim, 2 * problem.shift_d, 2),
      hankel_det(f, problem.hankel_dim, 2 * problem.shift_d + 1, 2)};
}

RpmResult hankel_root(const RpmProblem& problem, double seed_e, std::optional<double> seed_f0) {
  problem.validate();
  PrecisionScope scope(problem.precision);
  if (problem.kind == Kind::symmetric) return solve_symmetric(problem, real(seed_e));
  if (!seed_f0) throw DomainError("nonsymmetric problems need an f0 seed");
  return solve_nonsymmetric(problem, real(seed_e), real(*seed_f0));
}

int stable_digits(const real& a, const real& b) {
  real scale = max(abs(a), abs(b));
  if (scale == 0) return std::numeric_limits<double>::digits10;
  real diff = abs(a - b);
  if (diff == 0) return static_cast<int>(a.precision());
  double digits = -std::log10(static_cast<double>(diff / scale));
  return std::max(0, static_cast<int>(std::floor(digits)));
}

std::vector<ConvergenceRow> convergence_table(RpmProblem problem, int d_min, int d_max, Seeds seeds) {
  if (d_min < 1 || d_max < d_min) throw DomainError("invalid Hankel dimension range");
  if (problem.kind == Kind::nonsymmetric && !seeds.f0) throw DomainError("nonsymmetric problems need an f0 seed");
  PrecisionScope scope(problem.precision);
  std::vector<ConvergenceRow> rows;
  std::optional<RpmResult> prev, before_prev;
  for (int D = d_min; D <= d_max; ++D) {
    problem.hankel_dim = D;
    std::vector<Seeds> candidates{seeds};
    if (prev) {
      Seeds s{static_cast<double>(prev->energy), std::nullopt};
      if (prev->f0) s.f0 = static_cast<double>(*prev->f0);
      candidates.push_back(s);
    }
    // The previous root is the better reference once the chain has settled
    // below the seed uncertainty; spurious Hankel roots cluster around both.
    const bool prev_anchor =
      prev && before_prev && abs(prev->energy - before_prev->energy) <= seeds.tolerance;
    auto distance = [&](const RpmResult& r) {
      return prev_anchor ? real(abs(r.energy - prev->energy)) : real(abs(r.energy - seeds.energy));
    };
    std::optional<RpmResult> best;
    real best_dist;
    for (const auto& c : candidates) {
      try {
        RpmResult r = hankel_root(problem, c.energy, c.f0);
        real dist = distance(r);
        if (!best || dist < best_dist) {
          best = r;
          best_dist = dist;
        }
      } catch (const NumericalError&) {
      }
    }
    if (best && prev) best->converged_digits = stable_digits(best->energy, prev->energy);
    rows.push_back({D, best});
    if (best) {
      before_prev = prev;
      prev = best;
    }
  }
  return rows;
}

std::string to_string(const real& x, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << x;
  return os.str();
}

}  // namespace ptsym::rpm
