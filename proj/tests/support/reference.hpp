#pragma once

// Test-side reference computations shared by the unit suites and the
// acceptance runner. Nothing here calls into the code it is used to check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "generators.hpp"
#include "ipi/rls.hpp"
#include "ipi/sysmodels.hpp"

namespace ipi::testing {

// Closed-form minimum iteration count for c = 1, p = 2 power laws, written out
// by hand: with a(s) = s^2 every inverse is a square root.
//   v(s) = s^2 / (1 - g)^q,  w(s) = s^2,  Gamma(s) = s^2.
struct ReferenceBound {
  double ratio;
  double raw;
  long long iterations;
};

inline ReferenceBound reference_iteration_bound(double g, double g_star, double delta,
                                                double big_delta, double q) {
  const double cv = 1.0 / std::pow(1.0 - g, q);
  const double s1_sq = delta * delta / (cv + 1.0 / g);
  const double num = (g - g_star) / (1.0 - g_star) * s1_sq;
  const double s2_sq = (cv + 1.0 / g) * big_delta * big_delta;
  const double beta_sq = (cv + 1.0 / g_star) * s2_sq;
  const double den = 2.0 * (1.0 - g) * cv * beta_sq;
  ReferenceBound out{};
  out.ratio = num / den;
  out.raw = std::log(out.ratio) / std::log(g);
  double r = out.raw;
  if (std::abs(r - std::round(r)) <= 1e-9) r = std::round(r);
  out.iterations = r > 0.0 ? static_cast<long long>(std::ceil(r)) : 0;
  return out;
}

// Incremental samples from x+ = A x + B u with A = [[0,1],[-2,-3]], B = [0;1]
// under u = 1.5 x1 + 2.5 x2 plus three sinusoids. The loop is stable and the
// sinusoids keep [dx; du] persistently exciting.
struct LtiSamples {
  Matrix A;
  Matrix B;
  std::vector<Vector> regressors;
  std::vector<Vector> observations;
};

inline LtiSamples lti_pe_samples(std::size_t count) {
  LtiSamples s;
  s.A = (Matrix(2, 2) << 0, 1, -2, -3).finished();
  s.B = (Matrix(2, 1) << 0, 1).finished();
  std::vector<StateVec> xs{(StateVec(2) << 0.3, -0.2).finished()};
  std::vector<double> us;
  for (std::size_t k = 0; k < count + 2; ++k) {
    const StateVec& x = xs.back();
    const double t = static_cast<double>(k);
    const double u = 1.5 * x(0) + 2.5 * x(1) + std::sin(0.5 * t) + 0.7 * std::sin(1.3 * t) +
                     0.4 * std::sin(2.9 * t);
    us.push_back(u);
    xs.push_back(s.A * x + s.B * u);
  }
  for (std::size_t k = 1; k <= count; ++k) {
    Vector X(3);
    X << xs[k] - xs[k - 1], us[k] - us[k - 1];
    s.regressors.push_back(X);
    s.observations.push_back(xs[k + 1] - xs[k]);
  }
  return s;
}

// Tracking error ||Theta_hat_k - Theta_k||_F for k = 0..steps under a
// parameter drifting by `drift` (Frobenius) per step along a fixed direction.
inline std::vector<double> drifting_tracking_errors(double cov_scale, double forgetting,
                                                    double drift, std::size_t steps,
                                                    std::uint64_t seed) {
  Gen gen(seed);
  Matrix truth = gen.matrix(3, 2);
  Matrix direction = gen.matrix(3, 2);
  direction /= direction.norm();
  RlsConfig cfg;
  cfg.forgetting = forgetting;
  cfg.initial_cov_scale = cov_scale;
  RecursiveLeastSquares rls(Matrix::Zero(3, 2), cfg);
  std::vector<double> errors;
  for (std::size_t k = 0; k <= steps; ++k) {
    errors.push_back((rls.theta() - truth).norm());
    Vector X(3);
    X << gen.normal(), gen.normal(), gen.normal();
    rls.update(X, truth.transpose() * X);
    truth += drift * direction;
  }
  return errors;
}

inline double max_over(const std::vector<double>& v, std::size_t from, std::size_t to) {
  return *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(from),
                           v.begin() + static_cast<std::ptrdiff_t>(to) + 1);
}

}  // namespace ipi::testing
