#include "ipi/policy.hpp"

#include "ipi/error.hpp"
#include "ipi/linalg.hpp"
#include "ipi/valuefn.hpp"

namespace ipi {

ControlVec improve_policy_increment(const StateVec& x, const StateVec& dx,
                                    const ControlVec& u_prev,
                                    const ThetaEstimate& theta,
                                    const QuadraticKernel& kernel,
                                    const CostSpec& cost) {
  const int nx = theta.state_dim();
  require_size(x, nx, "state");
  require_size(dx, nx, "state increment");
  require_size(u_prev, theta.input_dim(), "previous input");
  require_shape(kernel.matrix(), nx, nx, "kernel");
  require_shape(cost.R, theta.input_dim(), theta.input_dim(), "R");

  const Matrix a = theta.A_hat();
  const Matrix b = theta.B_hat();
  const Matrix& P = kernel.matrix();
  const double g = cost.gamma;
  const Matrix btp = b.transpose() * P;
  const Matrix m = symmetrize(cost.R + g * btp * b);

  Eigen::LLT<Matrix> llt(m);
  if (!m.allFinite() || llt.info() != Eigen::Success)
    fail(ErrorCode::kPolicyImprovement, "R + gamma B'PB is not positive definite");
  const Vector rhs = cost.R * u_prev + g * btp * x + g * btp * (a * dx);
  ControlVec du = -llt.solve(rhs);
  if (!du.allFinite())
    fail(ErrorCode::kPolicyImprovement, "policy increment is not finite");
  return du;
}

IncrementalPolicy::IncrementalPolicy(ThetaEstimate theta, QuadraticKernel kernel,
                                     CostSpec cost, double input_bound)
    : theta_(std::move(theta)),
      kernel_(std::move(kernel)),
      cost_(std::move(cost)),
      input_bound_(input_bound),
      u_prev_(ControlVec::Zero(theta_.input_dim())) {}

ControlVec IncrementalPolicy::act(std::size_t, const StateVec& x) {
  if (!x_prev_) x_prev_ = x;
  const StateVec dx = x - *x_prev_;
  const ControlVec du =
      improve_policy_increment(x, dx, u_prev_, theta_, kernel_, cost_);
  const ControlVec u = clamp_input(u_prev_ + du, input_bound_);
  x_prev_ = x;
  u_prev_ = u;
  return u;
}

double IncrementalPolicy::value_estimate(const StateVec& x) const {
  return eval_value(kernel_, x);
}

void IncrementalPolicy::prime(const StateVec& x_prev, const ControlVec& u_prev) {
  require_size(x_prev, theta_.state_dim(), "primed state");
  require_size(u_prev, theta_.input_dim(), "primed input");
  x_prev_ = x_prev;
  u_prev_ = u_prev;
}

void IncrementalPolicy::reset() {
  x_prev_.reset();
  u_prev_ = ControlVec::Zero(theta_.input_dim());
}

}  // namespace ipi
