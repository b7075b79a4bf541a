#pragma once

namespace ipi {

/// alpha(s) = coefficient * s^exponent / (1 - gamma)^discount_exponent.
/// The discount factor only enters through the last term, which lets the
/// value bound carry the usual 1/(1 - gamma) growth of discounted costs.
struct PowerLaw {
  double coefficient = 1.0;
  double exponent = 2.0;
  double discount_exponent = 0.0;

  double operator()(double s, double gamma = 0.0) const;
  double inverse(double v, double gamma = 0.0) const;
};

struct IterationBoundParams {
  PowerLaw alpha_gamma;  // lower bound alpha_Gamma
  PowerLaw alpha_v;      // upper bound on the initial value, bar alpha_V
  PowerLaw alpha_w;      // bound on Gamma, bar alpha_W
  double gamma = 0.7;
  double gamma_star = 0.4;
  double gamma_0 = 1.0;
  double delta = 0.3;
  /// Perturbation size Delta; for sigma = ||x|| this is eps_IME.
  double perturbation = 1.0;
};

struct IterationBound {
  long long iterations = 0;  // ceil(raw), floored at 0
  double raw = 0.0;          // ln(ratio) / ln(gamma)
  double ratio = 0.0;        // argument of the logarithm
  double numerator = 0.0;
  double denominator = 0.0;
  /// (1 - gamma_star) bar alpha_V <= alpha_Gamma on s > 0, the standing
  /// hypothesis behind beta_star.
  bool hypothesis_holds = false;
};

/// bar alpha_Y(s) = bar alpha_V(s) + bar alpha_W(s) / gamma
/// numerator   = (gamma - gamma_star) / (1 - gamma_star) *
///               alpha_Gamma(bar alpha_Y^-1(alpha_Gamma(delta)))
/// denominator = 2 (1 - gamma) bar alpha_V(beta_star(
///               alpha_Gamma^-1(bar alpha_Y(Delta)), 0))
/// beta_star(s, 0) = alpha_Gamma^-1(bar alpha_V(s) + bar alpha_W(s) / gamma_star)
/// Throws bound-undefined when the ratio is not a positive finite number or
/// gamma lies outside (gamma_star, gamma_0).
IterationBound min_iterations_bound(const IterationBoundParams& params);

}  // namespace ipi
