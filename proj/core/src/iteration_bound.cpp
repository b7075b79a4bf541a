#include "ipi/iteration_bound.hpp"

#include <cmath>
#include <string>

#include "ipi/error.hpp"

namespace ipi {

double PowerLaw::operator()(double s, double gamma) const {
  return coefficient * std::pow(s, exponent) /
         std::pow(1.0 - gamma, discount_exponent);
}

double PowerLaw::inverse(double v, double gamma) const {
  const double c = coefficient / std::pow(1.0 - gamma, discount_exponent);
  return std::pow(v / c, 1.0 / exponent);
}

namespace {

void check_law(const PowerLaw& law, const char* name) {
  if (!(law.coefficient > 0.0) || !(law.exponent > 0.0) ||
      !(law.discount_exponent >= 0.0) || !std::isfinite(law.coefficient) ||
      !std::isfinite(law.exponent))
    fail(ErrorCode::kPrecondition,
         std::string(name) + " must have positive coefficient and exponent");
}

// Inverse of s -> v_law(s) + w_law(s) / weight, both increasing power laws.
double inverse_sum(const PowerLaw& v_law, const PowerLaw& w_law, double weight,
                   double gamma, double target) {
  const double cv = v_law.coefficient / std::pow(1.0 - gamma, v_law.discount_exponent);
  const double cw = w_law.coefficient / weight;
  if (v_law.exponent == w_law.exponent)
    return std::pow(target / (cv + cw), 1.0 / v_law.exponent);
  auto f = [&](double s) {
    return cv * std::pow(s, v_law.exponent) + cw * std::pow(s, w_law.exponent);
  };
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

IterationBound min_iterations_bound(const IterationBoundParams& p) {
  check_law(p.alpha_gamma, "alpha_Gamma");
  check_law(p.alpha_v, "bar alpha_V");
  check_law(p.alpha_w, "bar alpha_W");
  if (p.alpha_gamma.discount_exponent != 0.0 || p.alpha_w.discount_exponent != 0.0)
    fail(ErrorCode::kPrecondition, "only bar alpha_V may depend on gamma");
  if (!(p.delta > 0.0) || !(p.perturbation > 0.0))
    fail(ErrorCode::kPrecondition, "delta and Delta must be positive");
  if (!(p.gamma_star > 0.0 && p.gamma_star < 1.0) ||
      !(p.gamma_0 > p.gamma_star && p.gamma_0 <= 1.0))
    fail(ErrorCode::kPrecondition, "need 0 < gamma_star < gamma_0 <= 1");
  if (!(p.gamma > p.gamma_star && p.gamma < p.gamma_0))
    fail(ErrorCode::kBoundUndefined,
         "gamma = " + std::to_string(p.gamma) + " is outside (gamma_star, gamma_0)");

  const double g = p.gamma;
  const PowerLaw& ag = p.alpha_gamma;
  const PowerLaw& av = p.alpha_v;
  const PowerLaw& aw = p.alpha_w;

  IterationBound out;
  const double delta_tilde = ag(p.delta);
  const double s1 = inverse_sum(av, aw, g, g, delta_tilde);
  out.numerator = (g - p.gamma_star) / (1.0 - p.gamma_star) * ag(s1);

  const double s2 = ag.inverse(av(p.perturbation, g) + aw(p.perturbation) / g);
  const double beta0 = ag.inverse(av(s2, g) + aw(s2) / p.gamma_star);
  out.denominator = 2.0 * (1.0 - g) * av(beta0, g);

  out.ratio = out.numerator / out.denominator;
  if (!(out.ratio > 0.0) || !std::isfinite(out.ratio))
    fail(ErrorCode::kBoundUndefined,
         "logarithm argument " + std::to_string(out.ratio) + " is not positive");
  out.raw = std::log(out.ratio) / std::log(g);
  // Rounding noise must not push an exact integer up by one.
  const double nearest = std::round(out.raw);
  const double snapped = std::abs(out.raw - nearest) <= 1e-9 ? nearest : out.raw;
  out.iterations = snapped > 0.0 ? static_cast<long long>(std::ceil(snapped)) : 0;

  const bool same_shape = av.exponent == ag.exponent && av.discount_exponent == 0.0;
  out.hypothesis_holds =
      same_shape && (1.0 - p.gamma_star) * av.coefficient <= ag.coefficient;
  return out;
}

}  // namespace ipi
