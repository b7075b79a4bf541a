#include "ipi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ipi/error.hpp"
#include "ipi/linalg.hpp"

namespace ipi {

MonotonicityReport check_monotonicity(const TrainingHistory& history) {
  MonotonicityReport report;
  if (history.records.size() < 2) return report;
  report.max_increase = -std::numeric_limits<double>::infinity();
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < history.records.size(); ++i) {
    const auto& before = history.records[i - 1].probe_values;
    const auto& after = history.records[i].probe_values;
    if (before.size() != after.size())
      fail(ErrorCode::kInput, "probe value counts differ between iterations");
    for (std::size_t j = 0; j < before.size(); ++j) {
      const double increase = after[j] - before[j];
      const double excess = increase - (1e-8 + 1e-6 * std::abs(before[j]));
      report.max_increase = std::max(report.max_increase, increase);
      if (excess > report.max_excess) {
        report.max_excess = excess;
        report.iteration = i;
        report.probe_index = j;
      }
    }
  }
  report.passed = !(report.max_excess > 0.0);
  return report;
}

double estimate_ime(const Trajectory& trajectory, const ThetaEstimate& theta,
                    std::size_t window) {
  const auto& recs = trajectory.records;
  if (window < 1) fail(ErrorCode::kPrecondition, "IME window must be >= 1");
  if (recs.size() <= window)
    fail(ErrorCode::kPrecondition,
         "trajectory has " + std::to_string(recs.size()) +
             " records, needs more than the window of " + std::to_string(window));
  if (recs.size() < 3)
    fail(ErrorCode::kPrecondition, "IME estimation needs at least 3 records");

  const Matrix a = theta.A_hat();
  const Matrix b = theta.B_hat();
  const std::size_t last = recs.size() - 2;  // residual index k uses k+1
  const std::size_t first = last + 1 > window ? last + 1 - window : 1;
  double worst = 0.0;
  for (std::size_t k = std::max<std::size_t>(first, 1); k <= last; ++k) {
    const StateVec dx = recs[k].x - recs[k - 1].x;
    const StateVec dx_next = recs[k + 1].x - recs[k].x;
    const ControlVec du = recs[k].u - recs[k - 1].u;
    worst = std::max(worst, (dx_next - (a * dx + b * du)).norm());
  }
  return worst;
}

NearOptimalityReport near_optimality_gap(const QuadraticKernel& learned,
                                         const QuadraticKernel& optimal,
                                         std::span<const StateVec> probe,
                                         const CostSpec& cost, double eps_ime,
                                         double lipschitz) {
  if (probe.empty()) fail(ErrorCode::kPrecondition, "probe grid is empty");
  if (!(cost.gamma > 0.0 && cost.gamma < 1.0))
    fail(ErrorCode::kPrecondition, "gamma must lie in (0, 1)");
  if (!(eps_ime >= 0.0) || !(lipschitz >= 0.0))
    fail(ErrorCode::kPrecondition, "eps_ime and L must be nonnegative");
  NearOptimalityReport r;
  for (const StateVec& x : probe)
    r.gap = std::max(r.gap, std::abs(learned.value(x) - optimal.value(x)));
  r.bound = cost.gamma * lipschitz * eps_ime / (1.0 - cost.gamma);
  r.within_bound = r.gap <= r.bound;
  return r;
}

SettleReport analyze_settling(const Trajectory& trajectory,
                              const StabilityIndicator& indicator,
                              std::size_t settle_step, double growth_factor) {
  SettleReport r;
  r.diverged = trajectory.diverged;
  const auto& recs = trajectory.records;
  if (recs.empty()) return r;
  r.initial_sigma = indicator.sigma(recs.front().x);
  r.final_sigma = indicator.sigma(recs.back().x);
  std::optional<std::size_t> entry;
  for (const TrajectoryRecord& rec : recs) {
    const double s = indicator.sigma(rec.x);
    r.max_sigma = std::max(r.max_sigma, s);
    if (s > indicator.delta) {
      entry.reset();
      if (rec.k >= settle_step) ++r.violations_after;
    } else if (!entry) {
      entry = rec.k;
    }
  }
  r.entry_step = entry;
  r.bounded = r.max_sigma <= growth_factor * r.initial_sigma;
  const bool covers = recs.back().k >= settle_step;
  r.passed = !r.diverged && covers && r.bounded && r.violations_after == 0;
  return r;
}

}  // namespace ipi
