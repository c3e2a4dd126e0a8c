#include "ptsym/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptsym/errors.hpp"

namespace ptsym {

namespace {

struct Bracket {
  double lo;
  double hi;
};

bool bracket_closed(double lo, double hi, double rel_tol) {
  const double scale = std::max({std::abs(lo), std::abs(hi), 1e-3});
  return hi - lo <= rel_tol * scale;
}

// Partial-pivoting LU of the tridiagonal matrix (sub = super = off).
class TridiagonalLu {
 public:
  TridiagonalLu(const std::vector<cplx>& diag, double off) : n_(diag.size()) {
    d_ = diag;
    dl_.assign(n_ > 0 ? n_ - 1 : 0, off);
    du_.assign(n_ > 0 ? n_ - 1 : 0, off);
    du2_.assign(n_ > 1 ? n_ - 2 : 0, 0.0);
    swapped_.assign(n_ > 0 ? n_ - 1 : 0, false);
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == 0.0) d_[i] = tiny();
        const cplx fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        const cplx fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const cplx temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        swapped_[i] = true;
      }
    }
    if (n_ > 0 && d_[n_ - 1] == 0.0) d_[n_ - 1] = tiny();
  }

  void solve(std::vector<cplx>& b) const {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (swapped_[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= dl_[i] * b[i];
    }
    b[n_ - 1] /= d_[n_ - 1];
    if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
    for (std::size_t i = n_ >= 3 ? n_ - 3 : 0; n_ >= 3; --i) {
      b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
      if (i == 0) break;
    }
  }

 private:
  static cplx tiny() { return {1e-300, 0.0}; }

  std::size_t n_;
  std::vector<cplx> d_, dl_, du_, du2_;
  std::vector<bool> swapped_;
};

double norm2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

double residual_norm(const TridiagonalOperator& op, double e, const std::vector<cplx>& x) {
  const std::size_t n = x.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cplx r = (op.diag[i] - e) * x[i];
    if (i > 0) r += op.off * x[i - 1];
    if (i + 1 < n) r += op.off * x[i + 1];
    s += std::norm(r);
  }
  return std::sqrt(s);
}

}  // namespace

double bisect_root(const TridiagonalOperator& op, double lo, double hi, double rel_tol) {
  int sign_lo = det_n(op, lo).real_sign();
  const int sign_hi = det_n(op, hi).real_sign();
  if (sign_lo == 0) return lo;
  if (sign_hi == 0) return hi;
  if (sign_lo == sign_hi) throw NumericalError("bisection needs a sign change of Re det on the bracket");
  for (int it = 0; it < 200 && !bracket_closed(lo, hi, rel_tol); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int s = det_n(op, mid).real_sign();
    if (s == 0) return mid;
    if (s == sign_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> find_real_eigenvalues(const TridiagonalOperator& op, double e_min, double e_max,
                                          const ScanOptions& options) {
  if (!(e_min < e_max)) throw DomainError("energy window must satisfy e_min < e_max");
  if (!(options.scan_step > 0.0)) throw DomainError("scan step must be positive");
  const auto steps = static_cast<std::size_t>(std::ceil((e_max - e_min) / options.scan_step));
  std::vector<double> energies(steps + 1);
  for (std::size_t j = 0; j < steps; ++j) energies[j] = e_min + static_cast<double>(j) * options.scan_step;
  energies[steps] = e_max;

  const auto dets = options.execution == Execution::parallel ? kernels::det_scan_parallel(op, energies)
                                                             : kernels::det_scan_serial(op, energies);
  std::vector<double> exact;
  std::vector<Bracket> brackets;
  for (std::size_t j = 0; j < energies.size(); ++j) {
    const int s = dets[j].real_sign();
    if (s == 0) {
      exact.push_back(energies[j]);
      continue;
    }
    if (j + 1 < energies.size()) {
      const int t = dets[j + 1].real_sign();
      if (t != 0 && t != s) brackets.push_back({energies[j], energies[j + 1]});
    }
  }

  std::vector<double> roots(brackets.size());
  const auto count = static_cast<std::ptrdiff_t>(brackets.size());
  if (options.execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) roots[i] = bisect_root(op, brackets[i].lo, brackets[i].hi, options.rel_tol);
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) roots[i] = bisect_root(op, brackets[i].lo, brackets[i].hi, options.rel_tol);
  }
  roots.insert(roots.end(), exact.begin(), exact.end());
  std::sort(roots.begin(), roots.end());
  return roots;
}

GridSpec grid_for(const PotentialParams& params, const FamilySelector& family, const GridPolicy& policy) {
  GridSpec grid;
  grid.x_max = policy.x_max;
  grid.n = policy.n;
  grid.y = policy.y_override ? *policy.y_override : optimal_shift(params, family).y;
  return grid;
}

TridiagonalOperator operator_for(const PotentialParams& params, const FamilySelector& family,
                                 const GridPolicy& policy) {
  return build_hamiltonian(params, grid_for(params, family, policy));
}

double solve_alpha_for_energy(const PotentialParams& params_template, const FamilySelector& family,
                              const GridPolicy& policy, double e, std::pair<double, double> alpha_bracket,
                              double tol) {
  auto sign_at = [&](double alpha) {
    PotentialParams p = params_template;
    p.alpha = alpha;
    return det_n(operator_for(p, family, policy), e).real_sign();
  };
  double lo = std::min(alpha_bracket.first, alpha_bracket.second);
  double hi = std::max(alpha_bracket.first, alpha_bracket.second);
  const int s_lo = sign_at(lo);
  const int s_hi = sign_at(hi);
  if (s_lo == 0) return lo;
  if (s_hi == 0) return hi;
  if (s_lo == s_hi) {
    throw NumericalError("no sign change of det in alpha on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "] at E = " + std::to_string(e));
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int s = sign_at(mid);
    if (s == 0) return mid;
    if (s == s_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

WaveFunction eigenvector(const TridiagonalOperator& op, double e, int max_iterations) {
  const std::size_t n = op.size();
  std::vector<cplx> diag_shifted(op.diag);
  for (cplx& d : diag_shifted) d -= e;
  const TridiagonalLu lu(diag_shifted, op.off);

  std::vector<cplx> x(n, cplx{1.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) x[i] += 0.1 * std::sin(0.37 * static_cast<double>(i));
  double nx = norm2(x);
  for (cplx& v : x) v /= nx;

  WaveFunction wf;
  wf.grid = op.grid;
  wf.energy = e;
  bool converged = false;
  int it = 0;
  while (it < max_iterations) {
    ++it;
    std::vector<cplx> next = x;
    lu.solve(next);
    nx = norm2(next);
    if (!std::isfinite(nx) || nx == 0.0) throw NumericalError("inverse iteration broke down");
    for (cplx& v : next) v /= nx;
    // Align the phase with the previous iterate before comparing.
    cplx overlap{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) overlap += std::conj(x[i]) * next[i];
    const cplx align = std::abs(overlap) > 0.0 ? std::conj(overlap) / std::abs(overlap) : cplx{1.0, 0.0};
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::norm(next[i] * align - x[i]);
    x = std::move(next);
    if (std::sqrt(change) < 1e-11) {
      converged = true;
      break;
    }
  }
  const double scale = std::max({std::abs(op.off) * 4.0, 1.0});
  const double residual = residual_norm(op, e, x);
  if (!converged || residual > 1e-6 * std::max(1.0, std::abs(e)) + 1e-12 * scale) {
    throw NumericalError("inverse iteration did not converge at E = " + std::to_string(e) +
                         " (residual " + std::to_string(residual) + "); E is not an eigenvalue on this grid");
  }

  // PT phase: conj(psi[n-1-k]) = psi[k] after rotation by exp(i phi).
  cplx pairing{0.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) pairing += x[k] * x[n - 1 - k];
  const cplx rotation = std::abs(pairing) > 0.0 ? std::polar(1.0, -0.5 * std::arg(pairing)) : cplx{1.0, 0.0};
  for (cplx& v : x) v *= rotation;
  std::size_t peak = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (std::abs(x[k]) > std::abs(x[peak])) peak = k;
  }
  const bool flip = x[peak].real() < 0.0 || (x[peak].real() == 0.0 && x[peak].imag() < 0.0);
  const double h = op.grid.step();
  const double norm = std::sqrt(h) * norm2(x);
  for (cplx& v : x) v = (flip ? -v : v) / norm;

  wf.values = std::move(x);
  wf.iterations = it;
  return wf;
}

cplx WaveFunction::log_derivative_at_center() const {
  const std::size_t n = values.size();
  const double h = grid.step();
  if (n < 3) throw DomainError("need at least three grid points for a central difference");
  cplx psi;
  cplx dpsi;
  if (n % 2 == 0) {
    const cplx a = values[n / 2 - 1];
    const cplx b = values[n / 2];
    psi = 0.5 * (a + b);
    dpsi = (b - a) / h;
  } else {
    const std::size_t c = n / 2;
    psi = values[c];
    dpsi = (values[c + 1] - values[c - 1]) / (2.0 * h);
  }
  return cplx{0.0, -1.0} * dpsi / psi;
}

double WaveFunction::parity_defect() const {
  const std::size_t n = values.size();
  double peak = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx a = values[k];
    const cplx b = values[n - 1 - k];
    peak = std::max(peak, std::abs(a));
    worst = std::max({worst, std::abs(a.real() - b.real()), std::abs(a.imag() + b.imag())});
  }
  return peak > 0.0 ? worst / peak : 0.0;
}

int WaveFunction::imag_sign_right_of_center() const {
  const std::size_t n = values.size();
  const double v = values[n / 2 + (n % 2)].imag();
  return (v > 0.0) - (v < 0.0);
}

std::vector<ConfirmedLevel> confirmed_real_eigenvalues(const PotentialParams& params, const FamilySelector& family,
                                                       const GridPolicy& policy, double e_min, double e_max,
                                                       const ScanOptions& options) {
  if (policy.n < 4) throw DomainError("grid needs at least 4 points for a refinement check");
  GridPolicy coarse_policy = policy;
  coarse_policy.n = policy.n / 2;
  const TridiagonalOperator fine_op = operator_for(params, family, policy);
  const TridiagonalOperator coarse_op = operator_for(params, family, coarse_policy);
  const double margin = 1.0;
  const auto fine = find_real_eigenvalues(fine_op, e_min, e_max, options);
  const auto coarse = find_real_eigenvalues(coarse_op, e_min - margin, e_max + margin, options);
  const double hc = coarse_op.grid.step();
  std::vector<ConfirmedLevel> out;
  for (double e : fine) {
    const double tol = hc * hc * (1.0 + e * e) + 1e-6;
    const double* best = nullptr;
    for (const double& c : coarse) {
      if (!best || std::abs(c - e) < std::abs(*best - e)) best = &c;
    }
    if (best && std::abs(*best - e) <= tol) out.push_back({e, *best, std::abs(e - *best) / 3.0});
  }
  return out;
}

double default_x_max(const PotentialParams& params, const FamilySelector& family, double y) {
  double x = 8.0;
  for (; x < 30.0; x += 0.5) {
    const cplx g = asymptotic_g_shifted(params, family, x, y);
    if (g.real() >= -1e-9 * std::abs(g)) break;  // no decaying selection on this line
    if (-g.real() > 30.0) break;
  }
  return x;
}

}  // namespace ptsym
