#include "ipi/cost.hpp"

#include <cmath>
#include <limits>

#include "ipi/error.hpp"
#include "ipi/linalg.hpp"

namespace ipi {

double CostSpec::stage(const StateVec& x, const ControlVec& u) const {
  require_size(x, Q.rows(), "state");
  require_size(u, R.rows(), "input");
  return x.dot(Q * x) + u.dot(R * u);
}

double CostSpec::state_lipschitz(double radius) const {
  return 2.0 * symmetric_eigenvalues(symmetrize(Q)).maxCoeff() * radius;
}

CostSpec make_cost(Matrix Q, Matrix R, double gamma) {
  CostSpec cost{std::move(Q), std::move(R), gamma};
  validate(cost);
  return cost;
}

void validate(const CostSpec& cost) {
  if (cost.Q.rows() == 0 || cost.Q.rows() != cost.Q.cols())
    fail(ErrorCode::kConfiguration, "Q must be square and nonempty");
  if (cost.R.rows() == 0 || cost.R.rows() != cost.R.cols())
    fail(ErrorCode::kConfiguration, "R must be square and nonempty");
  if (!is_positive_definite(cost.Q))
    fail(ErrorCode::kConfiguration, "Q must be symmetric positive definite");
  if (!is_positive_definite(cost.R))
    fail(ErrorCode::kConfiguration, "R must be symmetric positive definite");
  if (!(cost.gamma >= 0.0 && cost.gamma < 1.0))
    fail(ErrorCode::kConfiguration,
         "discount gamma must lie in [0, 1), got " + std::to_string(cost.gamma));
}

QuadraticKernel::QuadraticKernel(Matrix P, double gamma)
    : P_(std::move(P)), gamma_(gamma) {
  if (P_.rows() != P_.cols())
    fail(ErrorCode::kConfiguration, "kernel matrix must be square");
  if (!P_.allFinite())
    fail(ErrorCode::kConfiguration, "kernel matrix has non-finite entries");
  P_ = symmetrize(P_);
}

QuadraticKernel QuadraticKernel::zero(int n, double gamma) {
  return QuadraticKernel(Matrix::Zero(n, n), gamma);
}

double QuadraticKernel::value(const StateVec& x) const {
  require_size(x, P_.rows(), "state");
  return x.dot(P_ * x);
}

double QuadraticKernel::min_eigenvalue() const {
  return symmetric_eigenvalues(P_).minCoeff();
}

bool QuadraticKernel::is_psd(double tol) const {
  return min_eigenvalue() >= -tol;
}

QuadraticKernel project_psd(const QuadraticKernel& kernel) {
  const Matrix p = clamp_spectrum(kernel.matrix(), 0.0,
                                  std::numeric_limits<double>::infinity());
  return QuadraticKernel(p, kernel.gamma());
}

}  // namespace ipi
