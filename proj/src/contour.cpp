#include "ptsym/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ptsym/errors.hpp"

namespace ptsym {

namespace {
constexpr double kPi = std::numbers::pi;
}

void FamilySelector::validate() const {
  if (alpha_ref < 2 || (alpha_ref - 2) % 4 != 0) {
    throw DomainError("family reference exponent must be 2 + 4N, got " + std::to_string(alpha_ref));
  }
  if (branch_sign != 1 && branch_sign != -1) throw DomainError("branch sign must be +1 or -1");
}

double asymptotic_phase(const PotentialParams& params, double y) {
  params.validate();
  return kPi * (params.alpha + 2.0) / 4.0 + y * params.total() / 2.0;
}

double unclamped_optimal_shift(const PotentialParams& params, const FamilySelector& family) {
  params.validate();
  family.validate();
  const double ar = family.alpha_ref;
  const double s = params.total();
  if (family.branch_sign > 0) return (ar - params.alpha) * kPi / (2.0 * s);
  return -kPi * (params.alpha + ar) / (2.0 * s);
}

ContourSpec optimal_shift(const PotentialParams& params, const FamilySelector& family) {
  const double y_opt = unclamped_optimal_shift(params, family);
  // theta = theta_opt +- pi/2 bounds the region where exp(G) still decays.
  const double half_width = kPi / params.total();
  ContourSpec spec;
  spec.y_plus = y_opt + half_width;
  spec.y_minus = y_opt - half_width;
  if (spec.y_minus > 0.0) {
    throw DomainError("alpha = " + std::to_string(params.alpha) + " admits no PT-consistent contour in family " +
                      std::to_string(family.alpha_ref) + (family.branch_sign > 0 ? "+" : "-"));
  }
  spec.y = y_opt;
  if (y_opt > 0.0) {
    spec.y = 0.0;
    spec.y_plus = 0.0;
  }
  spec.theta = asymptotic_phase(params, spec.y);
  return spec;
}

cplx asymptotic_g(const PotentialParams& params, const FamilySelector& family, double x) {
  return asymptotic_g_shifted(params, family, x, 0.0);
}

cplx asymptotic_g_shifted(const PotentialParams& params, const FamilySelector& family, double x,
                          double y) {
  params.validate();
  family.validate();
  const double s = params.total();
  const double magnitude = 2.0 * std::exp(s * x / 2.0) / (std::pow(2.0, s / 2.0) * s);
  // The family's optimal line has phase pi (alpha_R + 2)/4 on the principal
  // branch and pi (2 - alpha_R)/4 on the alternative one; the sign that makes G
  // real negative there is branch_sign (-1)^N with alpha_R = 2 + 4N.
  const int n = (family.alpha_ref - 2) / 4;
  const double sign = family.branch_sign * (n % 2 == 0 ? 1.0 : -1.0);
  return sign * std::polar(magnitude, asymptotic_phase(params, y));
}

}  // namespace ptsym
