#pragma once

#include <span>

#include "ipi/cost.hpp"
#include "ipi/rls.hpp"
#include "ipi/types.hpp"

namespace ipi {

double eval_value(const QuadraticKernel& kernel, const StateVec& x);

/// x_hat_{k+1} = x_k + A_hat dx_k + B_hat du_k.
StateVec predict_next_state(const StateVec& x, const StateVec& dx,
                            const ControlVec& du, const ThetaEstimate& theta);

/// l(x, u) + gamma * x_hat' P x_hat.
double bellman_target(const StateVec& x, const ControlVec& u,
                      const StateVec& x_next_hat, const QuadraticKernel& kernel,
                      const CostSpec& cost);

/// Upper-triangle monomials with off-diagonal terms doubled, so that
/// quadratic_features(x) . half_vectorize(P) = x'Px. For n = 2 this is
/// (x1^2, 2 x1 x2, x2^2).
Vector quadratic_features(const StateVec& x);
Vector half_vectorize(const Matrix& P);
Matrix from_half_vector(const Vector& p, int n);
int feature_dim(int n);

struct KernelFit {
  QuadraticKernel kernel;
  double min_eigenvalue = 0.0;
  bool psd_warning = false;  // min eigenvalue below -1e-8
  double residual_rms = 0.0;
};

/// Least-squares fit of phi(x_k) . p = l(x_k, u_k) + gamma phi(x_hat_k) .
/// vec(P_prev). Throws insufficient-excitation when the features do not span
/// the symmetric matrices.
KernelFit fit_kernel_batch(std::span<const StateVec> states,
                           std::span<const ControlVec> inputs,
                           std::span<const StateVec> next_hats,
                           const QuadraticKernel& previous,
                           const CostSpec& cost);

/// Recursive kernel estimate for the online update: one RLS step per sample
/// on the features of x_k, targeting l(x_k, u_k) + gamma x_hat' P_{k-1} x_hat.
class KernelRls {
 public:
  KernelRls(const QuadraticKernel& initial, const RlsConfig& config);

  /// Returns the innovation; a zero state carries no information and leaves
  /// the estimate untouched.
  double update(const StateVec& x, const ControlVec& u,
                const StateVec& x_next_hat, const CostSpec& cost);

  /// Same step with an explicit kernel in the target instead of the current
  /// estimate.
  double update(const StateVec& x, const ControlVec& u,
                const StateVec& x_next_hat, const QuadraticKernel& target_kernel,
                const CostSpec& cost);

  QuadraticKernel kernel() const;
  const RecursiveLeastSquares& estimator() const { return rls_; }
  RecursiveLeastSquares& estimator() { return rls_; }

 private:
  int n_;
  double gamma_;
  RecursiveLeastSquares rls_;
};

double fit_kernel_recursive(KernelRls& state, const StateVec& x,
                            const ControlVec& u, const StateVec& x_next_hat,
                            const CostSpec& cost);

}  // namespace ipi
