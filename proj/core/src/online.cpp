#include "ipi/online.hpp"

#include <cmath>

#include "ipi/error.hpp"
#include "ipi/linalg.hpp"
#include "ipi/policy.hpp"

namespace ipi {

void validate(const OnlineConfig& config) {
  validate(config.identifier);
  validate(config.kernel);
  if (std::isnan(config.input_bound))
    fail(ErrorCode::kConfiguration, "input bound must be a number");
}

OnlineAdapter::OnlineAdapter(const ThetaEstimate& theta,
                             const QuadraticKernel& kernel, const CostSpec& cost,
                             const OnlineConfig& config)
    : cost_(cost),
      config_(config),
      nx_(theta.state_dim()),
      identifier_(theta.matrix(), config.identifier),
      kernel_rls_(QuadraticKernel(kernel.matrix(), cost.gamma), config.kernel),
      u_prev_(ControlVec::Zero(theta.input_dim())) {
  validate(config_);
  if (kernel.dim() != nx_ || cost.state_dim() != nx_ ||
      cost.input_dim() != theta.input_dim())
    fail(ErrorCode::kConfiguration, "baseline and cost dimensions disagree");
}

void OnlineAdapter::prime(const StateVec& x_prev, const ControlVec& u_prev) {
  require_size(x_prev, nx_, "primed state");
  require_size(u_prev, u_prev_.size(), "primed input");
  x_prev_ = x_prev;
  u_prev_ = u_prev;
}

ThetaEstimate OnlineAdapter::theta() const {
  return ThetaEstimate(identifier_.theta(), nx_);
}

QuadraticKernel OnlineAdapter::kernel() const { return kernel_rls_.kernel(); }

OnlineStep OnlineAdapter::hold(const StateVec& x, StepEvent event,
                               const std::string& message, Vector innovation) {
  ++held_steps_;
  OnlineStep out;
  out.u = u_prev_;
  out.du = ControlVec::Zero(u_prev_.size());
  out.innovation = std::move(innovation);
  out.event = event;
  out.message = message;
  last_regressor_ = augmented_regressor(x - *x_prev_, out.du);
  x_prev_ = x;
  return out;
}

OnlineStep OnlineAdapter::step(const StateVec& x) {
  require_size(x, nx_, "state");
  ++steps_;
  if (!x_prev_) x_prev_ = x;
  const StateVec dx = x - *x_prev_;

  Vector innovation;
  try {
    if (last_regressor_) innovation = identifier_.update(*last_regressor_, dx);
  } catch (const IdentifierDegraded& e) {
    return hold(x, StepEvent::kIdentifierDegraded, e.what(), Vector());
  }

  const ThetaEstimate theta(identifier_.theta(), nx_);
  try {
    const QuadraticKernel before = project_psd(kernel_rls_.kernel());
    const ControlVec du_candidate =
        improve_policy_increment(x, dx, u_prev_, theta, before, cost_);
    const ControlVec u_candidate =
        clamp_input(u_prev_ + du_candidate, config_.input_bound);
    const StateVec x_hat =
        predict_next_state(x, dx, u_candidate - u_prev_, theta);
    kernel_rls_.update(x, u_candidate, x_hat, before, cost_);

    const QuadraticKernel after = project_psd(kernel_rls_.kernel());
    const ControlVec du = improve_policy_increment(x, dx, u_prev_, theta, after, cost_);
    OnlineStep out;
    out.u = clamp_input(u_prev_ + du, config_.input_bound);
    out.du = out.u - u_prev_;
    out.innovation = std::move(innovation);
    last_regressor_ = augmented_regressor(dx, out.du);
    x_prev_ = x;
    u_prev_ = out.u;
    return out;
  } catch (const IdentifierDegraded& e) {
    return hold(x, StepEvent::kIdentifierDegraded, e.what(), innovation);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kPolicyImprovement) throw;
    return hold(x, StepEvent::kPolicyImprovement, e.what(), innovation);
  }
}

OnlineController::OnlineController(OnlineAdapter adapter)
    : adapter_(std::move(adapter)) {}

ControlVec OnlineController::act(std::size_t, const StateVec& x) {
  OnlineStep s = adapter_.step(x);
  ControlVec u = s.u;
  log_.push_back(std::move(s));
  return u;
}

double OnlineController::value_estimate(const StateVec& x) const {
  return adapter_.kernel().value(x);
}

}  // namespace ipi
