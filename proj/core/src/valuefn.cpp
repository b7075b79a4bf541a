#include "ipi/valuefn.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ipi/error.hpp"
#include "ipi/linalg.hpp"

namespace ipi {

double eval_value(const QuadraticKernel& kernel, const StateVec& x) {
  return kernel.value(x);
}

StateVec predict_next_state(const StateVec& x, const StateVec& dx,
                            const ControlVec& du, const ThetaEstimate& theta) {
  require_size(x, theta.state_dim(), "state");
  require_size(dx, theta.state_dim(), "state increment");
  require_size(du, theta.input_dim(), "input increment");
  return x + theta.A_hat() * dx + theta.B_hat() * du;
}

double bellman_target(const StateVec& x, const ControlVec& u,
                      const StateVec& x_next_hat, const QuadraticKernel& kernel,
                      const CostSpec& cost) {
  return cost.stage(x, u) + cost.gamma * kernel.value(x_next_hat);
}

int feature_dim(int n) { return n * (n + 1) / 2; }

Vector quadratic_features(const StateVec& x) {
  const auto n = static_cast<int>(x.size());
  Vector phi(feature_dim(n));
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      phi(idx++) = (i == j ? 1.0 : 2.0) * x(i) * x(j);
  return phi;
}

Vector half_vectorize(const Matrix& P) {
  const auto n = static_cast<int>(P.rows());
  require_shape(P, n, n, "kernel");
  Vector p(feature_dim(n));
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) p(idx++) = 0.5 * (P(i, j) + P(j, i));
  return p;
}

Matrix from_half_vector(const Vector& p, int n) {
  require_size(p, feature_dim(n), "half-vectorized kernel");
  Matrix P(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      P(i, j) = p(idx);
      P(j, i) = p(idx);
      ++idx;
    }
  return P;
}

KernelFit fit_kernel_batch(std::span<const StateVec> states,
                           std::span<const ControlVec> inputs,
                           std::span<const StateVec> next_hats,
                           const QuadraticKernel& previous,
                           const CostSpec& cost) {
  if (states.size() != inputs.size() || states.size() != next_hats.size())
    fail(ErrorCode::kConfiguration, "kernel fit inputs have different lengths");
  const int n = cost.state_dim();
  require_shape(previous.matrix(), n, n, "previous kernel");
  const int d = feature_dim(n);
  if (static_cast<int>(states.size()) < d)
    fail(ErrorCode::kInsufficientExcitation,
         "kernel fit needs at least " + std::to_string(d) + " samples");

  const auto rows = static_cast<Eigen::Index>(states.size());
  Matrix features(rows, d);
  Vector targets(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto s = static_cast<std::size_t>(i);
    features.row(i) = quadratic_features(states[s]).transpose();
    targets(i) = bellman_target(states[s], inputs[s], next_hats[s], previous, cost);
  }
  if (!features.allFinite() || !targets.allFinite())
    fail(ErrorCode::kInput, "kernel fit data has non-finite entries");

  Eigen::ColPivHouseholderQR<Matrix> qr(features);
  qr.setThreshold(1e-10);
  if (qr.rank() < d)
    fail(ErrorCode::kInsufficientExcitation,
         "quadratic features do not span the symmetric matrices (rank " +
             std::to_string(qr.rank()) + " of " + std::to_string(d) + ")");
  const Vector p = qr.solve(targets);

  KernelFit fit;
  fit.kernel = QuadraticKernel(from_half_vector(p, n), cost.gamma);
  fit.min_eigenvalue = fit.kernel.min_eigenvalue();
  fit.psd_warning = fit.min_eigenvalue < -kPsdTolerance;
  fit.residual_rms =
      std::sqrt((features * p - targets).squaredNorm() / static_cast<double>(rows));
  return fit;
}

KernelRls::KernelRls(const QuadraticKernel& initial, const RlsConfig& config)
    : n_(initial.dim()),
      gamma_(initial.gamma()),
      rls_(half_vectorize(initial.matrix()), config) {}

double KernelRls::update(const StateVec& x, const ControlVec& u,
                         const StateVec& x_next_hat, const CostSpec& cost) {
  return update(x, u, x_next_hat, kernel(), cost);
}

double KernelRls::update(const StateVec& x, const ControlVec& u,
                         const StateVec& x_next_hat,
                         const QuadraticKernel& target_kernel,
                         const CostSpec& cost) {
  require_size(x, n_, "state");
  if (x.isZero(0.0)) return 0.0;
  const double target = bellman_target(x, u, x_next_hat, target_kernel, cost);
  const Vector innovation =
      rls_.update(quadratic_features(x), Vector::Constant(1, target));
  return innovation(0);
}

QuadraticKernel KernelRls::kernel() const {
  return QuadraticKernel(from_half_vector(rls_.theta().col(0), n_), gamma_);
}

double fit_kernel_recursive(KernelRls& state, const StateVec& x,
                            const ControlVec& u, const StateVec& x_next_hat,
                            const CostSpec& cost) {
  return state.update(x, u, x_next_hat, cost);
}

}  // namespace ipi
