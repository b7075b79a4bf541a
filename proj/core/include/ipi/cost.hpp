#pragma once

#include "ipi/types.hpp"

namespace ipi {

/// Discounted quadratic performance index: sum_k gamma^k (x'Qx + u'Ru).
struct CostSpec {
  Matrix Q;
  Matrix R;
  double gamma = 0.0;

  int state_dim() const { return static_cast<int>(Q.rows()); }
  int input_dim() const { return static_cast<int>(R.rows()); }

  double stage(const StateVec& x, const ControlVec& u) const;

  /// Lipschitz constant of x -> x'Qx on the ball of the given radius, input
  /// held fixed.
  double state_lipschitz(double radius) const;
};

CostSpec make_cost(Matrix Q, Matrix R, double gamma);

/// Q and R symmetric positive definite, gamma in [0, 1). gamma = 0 is allowed
/// for oracle use; experiment configs demand gamma > 0 separately.
void validate(const CostSpec& cost);

/// W(x) = x'Px. The discount the kernel was trained under travels with it.
class QuadraticKernel {
 public:
  QuadraticKernel() = default;
  explicit QuadraticKernel(Matrix P, double gamma = 0.0);

  static QuadraticKernel zero(int n, double gamma = 0.0);

  const Matrix& matrix() const { return P_; }
  double gamma() const { return gamma_; }
  int dim() const { return static_cast<int>(P_.rows()); }

  double value(const StateVec& x) const;
  double min_eigenvalue() const;
  bool is_psd(double tol = kPsdTolerance) const;

 private:
  Matrix P_;
  double gamma_ = 0.0;
};

/// Eigenvalue clamp at zero.
QuadraticKernel project_psd(const QuadraticKernel& kernel);

}  // namespace ipi
