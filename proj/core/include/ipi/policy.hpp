#pragma once

#include <optional>

#include "ipi/cost.hpp"
#include "ipi/rls.hpp"
#include "ipi/trajectory.hpp"

namespace ipi {

/// du = -(R + g B'PB)^-1 [R u_prev + g B'P x + g B'P A dx], the unconstrained
/// minimizer over du of the Bellman target through the incremental model.
/// Throws a policy-improvement error when R + g B'PB is not positive
/// definite.
ControlVec improve_policy_increment(const StateVec& x, const StateVec& dx,
                                    const ControlVec& u_prev,
                                    const ThetaEstimate& theta,
                                    const QuadraticKernel& kernel,
                                    const CostSpec& cost);

/// Closed-loop use of a fixed (theta, P) pair. Tracks x_{k-1} and u_{k-1}
/// itself; before the first call the history is x_{-1} = x_0, u_{-1} = 0.
class IncrementalPolicy final : public Controller {
 public:
  IncrementalPolicy(ThetaEstimate theta, QuadraticKernel kernel, CostSpec cost,
                    double input_bound = 0.0);

  ControlVec act(std::size_t k, const StateVec& x) override;
  double value_estimate(const StateVec& x) const override;

  void prime(const StateVec& x_prev, const ControlVec& u_prev);
  void reset();

  const ThetaEstimate& theta() const { return theta_; }
  const QuadraticKernel& kernel() const { return kernel_; }

 private:
  ThetaEstimate theta_;
  QuadraticKernel kernel_;
  CostSpec cost_;
  double input_bound_;
  std::optional<StateVec> x_prev_;
  ControlVec u_prev_;
};

}  // namespace ipi
