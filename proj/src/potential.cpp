#include "ptsym/potential.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ptsym/errors.hpp"

namespace ptsym {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCoshZeroGuard = 1e-6;

// exp(i pi t / 2), exact on the quarter turns.
cplx quarter_turns(double t) {
  double r = std::fmod(t, 4.0);
  if (r < 0.0) r += 4.0;
  if (r == 0.0) return {1.0, 0.0};
  if (r == 1.0) return {0.0, 1.0};
  if (r == 2.0) return {-1.0, 0.0};
  if (r == 3.0) return {0.0, -1.0};
  return std::polar(1.0, 0.5 * kPi * r);
}

struct ContinuedArgs {
  double sinh_arg;
  double cosh_arg;
};

// Arguments of sinh z and cosh z continued from y = 0 at fixed x >= 0.
ContinuedArgs continued_args(double x, double y) {
  const double m = std::round(y / kPi);
  const double yr = y - m * kPi;
  const double sy = std::sin(yr);
  const double cy = std::cos(yr);
  const double shx = std::sinh(x);
  const double chx = std::cosh(x);
  return {std::atan2(chx * sy, shx * cy) + m * kPi, std::atan2(shx * sy, chx * cy) + m * kPi};
}

cplx eval_right_half(const PotentialParams& p, cplx z) {
  const double x = z.real();
  const double y = z.imag();
  const double abs_sinh = std::abs(std::sinh(z));
  const double abs_cosh = std::abs(std::cosh(z));
  if (p.beta != 0.0 && abs_cosh < kCoshZeroGuard) {
    throw DomainError("contour passes through a zero of cosh at z = (" + std::to_string(x) + ", " +
                      std::to_string(y) + ")");
  }
  if (p.alpha > 0.0 && abs_sinh == 0.0) return {0.0, 0.0};

  const ContinuedArgs args = continued_args(x, y);
  const double extra = p.alpha * args.sinh_arg + p.beta * args.cosh_arg;
  cplx phase = quarter_turns(2.0 + p.alpha);
  if (extra != 0.0) phase *= std::polar(1.0, extra);
  const double magnitude =
      (p.alpha == 0.0 ? 1.0 : std::pow(abs_sinh, p.alpha)) * (p.beta == 0.0 ? 1.0 : std::pow(abs_cosh, p.beta));
  return magnitude * phase;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

void PotentialParams::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) throw DomainError("alpha and beta must be finite");
  if (alpha < 0.0) throw DomainError("alpha must be non-negative, got " + std::to_string(alpha));
  if (alpha + beta <= 0.0) {
    throw DomainError("alpha + beta must be positive for a confining potential, got " +
                      std::to_string(alpha + beta));
  }
}

cplx eval_potential(const PotentialParams& params, cplx z) {
  params.validate();
  if (z.real() >= 0.0) return eval_right_half(params, z);
  return std::conj(eval_right_half(params, {-z.real(), z.imag()}));
}

SignPair table1_signs(double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("alpha must be non-negative");
  // V = exp(i pi (2 + alpha)/2) * (positive) on x > 0.
  const cplx phase = quarter_turns(2.0 + alpha);
  return {sign_of(phase.real()), sign_of(phase.imag())};
}

std::vector<ComplexSample> effective_potential(const PotentialParams& params, double y,
                                               std::span<const double> xs) {
  params.validate();
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw DomainError("sample abscissae must be strictly increasing");
  }
  std::vector<ComplexSample> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const cplx z{x, y};
    out.push_back({z, eval_potential(params, z)});
  }
  return out;
}

}  // namespace ptsym
