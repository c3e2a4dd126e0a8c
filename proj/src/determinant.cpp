#include "ptsym/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptsym {

namespace {

constexpr int kRescaleBits = 64;
const double kUpper = std::ldexp(1.0, kRescaleBits);
const double kLower = std::ldexp(1.0, -kRescaleBits);

double max_component(cplx z) { return std::max(std::abs(z.real()), std::abs(z.imag())); }

}  // namespace

double ScaledDeterminant::imag_ratio() const {
  const double a = std::abs(mantissa);
  return a == 0.0 ? 0.0 : std::abs(mantissa.imag()) / a;
}

double ScaledDeterminant::log2_abs() const {
  const double a = std::abs(mantissa);
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log2(a) + static_cast<double>(exponent);
}

cplx ScaledDeterminant::value() const {
  const int e = static_cast<int>(std::clamp<std::int64_t>(exponent, -100000, 100000));
  return {std::ldexp(mantissa.real(), e), std::ldexp(mantissa.imag(), e)};
}

namespace {

// Runs the recurrence over diag[0..count) and returns (D_count, D_count-1)
// with a shared power-of-two exponent.
struct Partial {
  cplx curr;
  cplx prev;
  std::int64_t exponent = 0;
};

Partial recurrence(const TridiagonalOperator& op, cplx e, std::size_t count) {
  const double off2 = op.off * op.off;
  Partial p{op.diag[0] - e, {1.0, 0.0}, 0};
  for (std::size_t k = 1; k < count; ++k) {
    const cplx next = p.curr * (op.diag[k] - e) - off2 * p.prev;
    p.prev = p.curr;
    p.curr = next;
    const double m = max_component(p.curr);
    if (m > kUpper || (m < kLower && m > 0.0)) {
      const int shift = std::ilogb(m);
      p.prev = {std::ldexp(p.prev.real(), -shift), std::ldexp(p.prev.imag(), -shift)};
      p.curr = {std::ldexp(p.curr.real(), -shift), std::ldexp(p.curr.imag(), -shift)};
      p.exponent += shift;
    }
  }
  return p;
}

ScaledDeterminant normalize(cplx v, std::int64_t exponent) {
  ScaledDeterminant out;
  const double a = std::abs(v);
  if (a == 0.0 || !std::isfinite(a)) {
    out.mantissa = a == 0.0 ? cplx{0.0, 0.0} : v;
    out.exponent = 0;
    return out;
  }
  int shift = std::ilogb(a);
  cplx m{std::ldexp(v.real(), -shift), std::ldexp(v.imag(), -shift)};
  // ilogb of the modulus can leave |m| a hair outside [1, 2) after rounding.
  if (std::abs(m) >= 2.0) {
    m /= 2.0;
    ++shift;
  } else if (std::abs(m) < 1.0) {
    m *= 2.0;
    --shift;
  }
  out.mantissa = m;
  out.exponent = exponent + shift;
  return out;
}

}  // namespace

ScaledDeterminant det_recurrence(const TridiagonalOperator& op, cplx e) {
  const Partial p = recurrence(op, e, op.diag.size());
  return normalize(p.curr, p.exponent);
}

ScaledDeterminant det_n(const TridiagonalOperator& op, cplx e) {
  const std::size_t n = op.diag.size();
  if (!op.pt_exact || e.imag() != 0.0 || n < 2) return det_recurrence(op, e);
  const std::size_t m = n / 2;
  const double b2 = op.off * op.off;
  const Partial p = recurrence(op, e, m);
  double v = 0.0;
  if (n % 2 == 0) {
    v = std::norm(p.curr) - b2 * std::norm(p.prev);
  } else {
    const double c = op.diag[m].real() - e.real();
    v = c * std::norm(p.curr) - 2.0 * b2 * (p.curr * std::conj(p.prev)).real();
  }
  return normalize({v, 0.0}, 2 * p.exponent);
}

namespace kernels {

std::vector<ScaledDeterminant> det_scan_serial(const TridiagonalOperator& op, std::span<const double> energies) {
  std::vector<ScaledDeterminant> out(energies.size());
  for (std::size_t j = 0; j < energies.size(); ++j) out[j] = det_n(op, energies[j]);
  return out;
}

std::vector<ScaledDeterminant> det_scan_parallel(const TridiagonalOperator& op, std::span<const double> energies) {
  std::vector<ScaledDeterminant> out(energies.size());
  const auto count = static_cast<std::ptrdiff_t>(energies.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < count; ++j) out[j] = det_n(op, energies[j]);
  return out;
}

}  // namespace kernels

}  // namespace ptsym
