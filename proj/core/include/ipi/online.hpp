#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ipi/cost.hpp"
#include "ipi/rls.hpp"
#include "ipi/trajectory.hpp"
#include "ipi/valuefn.hpp"

namespace ipi {

struct OnlineConfig {
  RlsConfig identifier;
  RlsConfig kernel{0.995, 1.0};
  double input_bound = 0.0;  // <= 0: unconstrained
};

void validate(const OnlineConfig& config);

enum class StepEvent { kNone, kIdentifierDegraded, kPolicyImprovement };

struct OnlineStep {
  ControlVec u;
  ControlVec du;
  Vector innovation;  // identifier innovation; empty on the first step
  StepEvent event = StepEvent::kNone;
  std::string message;
};

/// Recursive adaptation loop seeded from an offline baseline. Each step:
/// identifier update with the previous regressor, one kernel-RLS step whose
/// target uses the candidate input from the previous kernel, PSD projection,
/// then the increment from the refreshed kernel. Failures hold u_{k-1}.
class OnlineAdapter {
 public:
  OnlineAdapter(const ThetaEstimate& theta, const QuadraticKernel& kernel,
                const CostSpec& cost, const OnlineConfig& config);

  /// Sets x_{k-1}, u_{k-1} explicitly. Without it the first step uses
  /// x_{-1} = x_0 and u_{-1} = 0.
  void prime(const StateVec& x_prev, const ControlVec& u_prev);

  OnlineStep step(const StateVec& x);

  ThetaEstimate theta() const;
  QuadraticKernel kernel() const;
  const RecursiveLeastSquares& identifier() const { return identifier_; }
  RecursiveLeastSquares& identifier() { return identifier_; }
  const KernelRls& kernel_estimator() const { return kernel_rls_; }
  const ControlVec& last_input() const { return u_prev_; }
  std::size_t held_steps() const { return held_steps_; }
  std::size_t steps() const { return steps_; }

 private:
  OnlineStep hold(const StateVec& x, StepEvent event, const std::string& message,
                  Vector innovation);

  CostSpec cost_;
  OnlineConfig config_;
  int nx_;
  RecursiveLeastSquares identifier_;
  KernelRls kernel_rls_;
  std::optional<StateVec> x_prev_;
  ControlVec u_prev_;
  std::optional<Vector> last_regressor_;
  std::size_t held_steps_ = 0;
  std::size_t steps_ = 0;
};

/// Adapter wearing the Controller interface; keeps the per-step log.
class OnlineController final : public Controller {
 public:
  explicit OnlineController(OnlineAdapter adapter);

  ControlVec act(std::size_t k, const StateVec& x) override;
  double value_estimate(const StateVec& x) const override;

  const OnlineAdapter& adapter() const { return adapter_; }
  OnlineAdapter& adapter() { return adapter_; }
  const std::vector<OnlineStep>& log() const { return log_; }

 private:
  OnlineAdapter adapter_;
  std::vector<OnlineStep> log_;
};

}  // namespace ipi
