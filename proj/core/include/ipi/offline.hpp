#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ipi/cost.hpp"
#include "ipi/rls.hpp"
#include "ipi/sysmodels.hpp"
#include "ipi/types.hpp"

namespace ipi {

/// Uniform grid on [-half_width, half_width]^n, origin excluded.
struct ProbeGrid {
  std::size_t points_per_axis = 5;
  double half_width = 1.0;

  std::vector<StateVec> states(int dim) const;
  /// Radius of the smallest ball holding the grid.
  double radius(int dim) const;
};

struct IpiConfig {
  CostSpec cost;
  double tolerance = 1e-6;
  std::size_t max_iterations = 200;
  ProbeGrid probe;
  Matrix initial_gain;  // h0(x) = initial_gain * x
  /// W0 = scale * I is the tail used by the initial evaluation. Zero makes
  /// the first iterate the bare stage cost of h0.
  double initial_kernel_scale = 100.0;
  double ridge = kDefaultRidge;
};

void validate(const IpiConfig& config);

struct TrainingRecord {
  std::size_t iteration = 0;
  QuadraticKernel kernel;
  std::vector<double> probe_values;
  double delta_frobenius = 0.0;  // ||P(i) - P(i-1)||_F; against W0 for i = 0
  bool psd_warning = false;
};

struct TrainingHistory {
  std::vector<StateVec> probe_states;
  std::vector<TrainingRecord> records;
};

/// Appends a record, filling probe values from the history's grid.
void append_record(TrainingHistory& history, const QuadraticKernel& kernel,
                   double delta_frobenius, bool psd_warning = false);

/// iteration,p11,p12,p22,...,delta_frobenius,probe_value_max
void write_history_csv(std::ostream& out, const TrainingHistory& history);
/// p11,p12,p22,...,iteration
void write_kernel_curve_csv(std::ostream& out, const TrainingHistory& history);

/// One policy sample: x_k with its increment and the input applied before it.
struct PolicySample {
  StateVec x;
  StateVec dx;
  ControlVec u_prev;
};

struct IncrementalSamples {
  std::vector<Vector> regressors;    // X_k = [dx_k; du_k]
  std::vector<Vector> observations;  // dx_{k+1}
  std::vector<PolicySample> policy;
};

IncrementalSamples extract_samples(const Dataset& data);

struct OfflineResult {
  QuadraticKernel kernel;
  ThetaEstimate theta;
  TrainingHistory history;
  bool converged = false;
  std::size_t psd_projections = 0;
};

/// Batch identification followed by policy iteration on the recorded states:
/// each iteration improves the policy on every sample through the
/// incremental model and refits the kernel once.
OfflineResult offline_train(const Dataset& data, const IpiConfig& config);

/// Same loop on pre-extracted samples and a given model.
OfflineResult offline_train(const IncrementalSamples& samples,
                            const ThetaEstimate& theta, const IpiConfig& config);

}  // namespace ipi
