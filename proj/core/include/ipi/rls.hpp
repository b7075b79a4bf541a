#pragma once

#include <cstddef>
#include <span>

#include "ipi/error.hpp"
#include "ipi/types.hpp"

namespace ipi {

/// Theta = [A B]' stacked as an (n_x + n_u) x n_x matrix, so that the
/// incremental model reads dx_{k+1}' = X_k' Theta with X_k = [dx_k; du_k].
class ThetaEstimate {
 public:
  ThetaEstimate() = default;
  ThetaEstimate(Matrix theta, int state_dim);

  static ThetaEstimate zero(int state_dim, int input_dim);
  static ThetaEstimate from_model(const Matrix& A, const Matrix& B);

  const Matrix& matrix() const { return theta_; }
  int state_dim() const { return static_cast<int>(theta_.cols()); }
  int input_dim() const { return static_cast<int>(theta_.rows() - theta_.cols()); }
  int regressor_dim() const { return static_cast<int>(theta_.rows()); }

  Matrix A_hat() const;
  Matrix B_hat() const;

 private:
  Matrix theta_;
};

Vector augmented_regressor(const StateVec& dx, const ControlVec& du);

/// dx_hat' = X' Theta.
Vector predict(const ThetaEstimate& theta, const Vector& X);

struct RlsConfig {
  double forgetting = 0.98;
  double initial_cov_scale = 1e6;
  double cov_floor = 1e-12;
  double cov_ceiling = 1e12;
};

void validate(const RlsConfig& config);

/// Raised when an update produces non-finite numbers; carries the estimate
/// from before the failed step.
class IdentifierDegraded : public Error {
 public:
  IdentifierDegraded(const std::string& message, Matrix last_valid);

  const Matrix& last_valid() const { return last_valid_; }

 private:
  Matrix last_valid_;
};

struct RlsStep {
  Matrix theta;
  Matrix covariance;
  Vector innovation;
  bool clipped = false;
};

/// One forgetting-factor RLS step for a generic parameter matrix
/// (d x m, regressor length d, observation length m).
RlsStep rls_update(const Matrix& theta, const Matrix& cov, const Vector& X,
                   const Vector& observed, const RlsConfig& config);

/// Stateful wrapper that keeps the step count and clip statistics.
class RecursiveLeastSquares {
 public:
  RecursiveLeastSquares(Matrix theta0, const RlsConfig& config);
  RecursiveLeastSquares(Matrix theta0, Matrix cov0, const RlsConfig& config);

  Vector predict(const Vector& X) const;

  /// Returns the innovation. On failure the state is left untouched.
  Vector update(const Vector& X, const Vector& observed);

  const Matrix& theta() const { return theta_; }
  const Matrix& covariance() const { return cov_; }
  const RlsConfig& config() const { return config_; }
  std::size_t steps() const { return steps_; }
  std::size_t clip_events() const { return clip_events_; }

  void restore(Matrix theta, Matrix cov, std::size_t steps);

 private:
  Matrix theta_;
  Matrix cov_;
  RlsConfig config_;
  std::size_t steps_ = 0;
  std::size_t clip_events_ = 0;
};

inline constexpr double kDefaultRidge = 1e-9;

/// Ridge-regularized least squares of observations on regressors, generic
/// in shape. Rank is judged on the unregularized regressor matrix.
Matrix least_squares(std::span<const Vector> regressors,
                     std::span<const Vector> observations, double ridge);

ThetaEstimate batch_ls(std::span<const Vector> regressors,
                       std::span<const Vector> observations,
                       double ridge = kDefaultRidge);

}  // namespace ipi
