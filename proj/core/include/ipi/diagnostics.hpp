#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "ipi/cost.hpp"
#include "ipi/offline.hpp"
#include "ipi/rls.hpp"
#include "ipi/trajectory.hpp"

namespace ipi {

struct MonotonicityReport {
  double max_increase = 0.0;  // max of V(i+1) - V(i) over grid and iterations
  double max_excess = 0.0;    // same, minus the allowance 1e-8 + 1e-6 V(i)
  std::size_t iteration = 0;  // i + 1 where the worst excess occurred
  std::size_t probe_index = 0;
  bool passed = true;
};

MonotonicityReport check_monotonicity(const TrainingHistory& history);

/// Max over the last `window` steps of ||dx_{k+1} - (A dx_k + B du_k)||.
/// Throws a precondition error unless the trajectory is longer than the
/// window.
double estimate_ime(const Trajectory& trajectory, const ThetaEstimate& theta,
                    std::size_t window);

struct NearOptimalityReport {
  double gap = 0.0;
  double bound = 0.0;  // gamma L eps / (1 - gamma)
  bool within_bound = false;
};

NearOptimalityReport near_optimality_gap(const QuadraticKernel& learned,
                                         const QuadraticKernel& optimal,
                                         std::span<const StateVec> probe,
                                         const CostSpec& cost, double eps_ime,
                                         double lipschitz);

/// sigma(x) = ||x||; the target neighborhood is the delta-ball.
struct StabilityIndicator {
  double delta = 0.3;

  double sigma(const StateVec& x) const { return x.norm(); }
  bool within(const StateVec& x) const { return sigma(x) <= delta; }
};

struct SettleReport {
  double initial_sigma = 0.0;
  double max_sigma = 0.0;
  double final_sigma = 0.0;
  bool bounded = false;  // max sigma <= growth_factor * initial sigma
  std::optional<std::size_t> entry_step;  // first k after which sigma stays <= delta
  std::size_t violations_after = 0;       // sigma > delta at k >= settle_step
  bool diverged = false;
  bool passed = false;
};

SettleReport analyze_settling(const Trajectory& trajectory,
                              const StabilityIndicator& indicator,
                              std::size_t settle_step, double growth_factor);

}  // namespace ipi
