#include "ipi/offline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "ipi/error.hpp"
#include "ipi/linalg.hpp"
#include "ipi/policy.hpp"
#include "ipi/trajectory.hpp"
#include "ipi/valuefn.hpp"

namespace ipi {

std::vector<StateVec> ProbeGrid::states(int dim) const {
  if (points_per_axis < 2 || !(half_width > 0.0))
    fail(ErrorCode::kConfiguration, "probe grid needs >= 2 points and positive width");
  std::vector<double> axis(points_per_axis);
  for (std::size_t i = 0; i < points_per_axis; ++i)
    axis[i] = -half_width + 2.0 * half_width * static_cast<double>(i) /
                                static_cast<double>(points_per_axis - 1);

  std::vector<StateVec> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    StateVec x(dim);
    for (int d = 0; d < dim; ++d) x(d) = axis[idx[static_cast<std::size_t>(d)]];
    if (!x.isZero(0.0)) out.push_back(x);
    int d = dim - 1;
    while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == points_per_axis) {
      idx[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return out;
}

double ProbeGrid::radius(int dim) const {
  return half_width * std::sqrt(static_cast<double>(dim));
}

void validate(const IpiConfig& config) {
  validate(config.cost);
  if (!(config.cost.gamma > 0.0))
    fail(ErrorCode::kConfiguration, "cost.gamma must lie in (0, 1)");
  if (!(config.tolerance > 0.0))
    fail(ErrorCode::kConfiguration, "ipi.tolerance must be positive");
  if (config.max_iterations < 1)
    fail(ErrorCode::kConfiguration, "ipi.max_iterations must be >= 1");
  if (config.probe.points_per_axis < 2 || !(config.probe.half_width > 0.0))
    fail(ErrorCode::kConfiguration, "probe grid needs >= 2 points and positive width");
  require_shape(config.initial_gain, config.cost.input_dim(),
                config.cost.state_dim(), "ipi.initial_gain");
  if (!config.initial_gain.allFinite())
    fail(ErrorCode::kConfiguration, "ipi.initial_gain has non-finite entries");
  if (!(config.initial_kernel_scale >= 0.0) ||
      !std::isfinite(config.initial_kernel_scale))
    fail(ErrorCode::kConfiguration, "ipi.initial_kernel_scale must be >= 0");
  if (!(config.ridge >= 0.0))
    fail(ErrorCode::kConfiguration, "ridge must be >= 0");
}

void append_record(TrainingHistory& history, const QuadraticKernel& kernel,
                   double delta_frobenius, bool psd_warning) {
  TrainingRecord rec;
  rec.iteration = history.records.size();
  rec.kernel = kernel;
  rec.delta_frobenius = delta_frobenius;
  rec.psd_warning = psd_warning;
  rec.probe_values.reserve(history.probe_states.size());
  for (const StateVec& x : history.probe_states)
    rec.probe_values.push_back(kernel.value(x));
  history.records.push_back(std::move(rec));
}

namespace {

std::string kernel_columns(int n) {
  std::string out;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      if (!out.empty()) out += ',';
      out += "p" + std::to_string(i + 1) + std::to_string(j + 1);
    }
  return out;
}

void write_kernel_entries(std::ostream& out, const Matrix& P) {
  const Vector p = half_vectorize(P);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) out << ',';
    out << format_double(p(i));
  }
}

int history_dim(const TrainingHistory& history) {
  return history.records.empty() ? 2 : history.records.front().kernel.dim();
}

}  // namespace

void write_history_csv(std::ostream& out, const TrainingHistory& history) {
  out << "iteration," << kernel_columns(history_dim(history))
      << ",delta_frobenius,probe_value_max\n";
  for (const TrainingRecord& r : history.records) {
    const double vmax = r.probe_values.empty()
                            ? 0.0
                            : *std::max_element(r.probe_values.begin(),
                                                r.probe_values.end());
    out << r.iteration << ',';
    write_kernel_entries(out, r.kernel.matrix());
    out << ',' << format_double(r.delta_frobenius) << ',' << format_double(vmax)
        << '\n';
  }
}

void write_kernel_curve_csv(std::ostream& out, const TrainingHistory& history) {
  out << kernel_columns(history_dim(history)) << ",iteration\n";
  for (const TrainingRecord& r : history.records) {
    write_kernel_entries(out, r.kernel.matrix());
    out << ',' << r.iteration << '\n';
  }
}

IncrementalSamples extract_samples(const Dataset& data) {
  IncrementalSamples s;
  for (const Episode& e : data.episodes) {
    const std::size_t len = e.inputs.size();
    if (e.states.size() != len + 1)
      fail(ErrorCode::kInput, "episode must hold one more state than inputs");
    for (std::size_t k = 1; k <= len; ++k) {
      s.policy.push_back({e.states[k], e.states[k] - e.states[k - 1], e.inputs[k - 1]});
      if (k < len) {
        s.regressors.push_back(augmented_regressor(e.states[k] - e.states[k - 1],
                                                   e.inputs[k] - e.inputs[k - 1]));
        s.observations.push_back(e.states[k + 1] - e.states[k]);
      }
    }
  }
  return s;
}

OfflineResult offline_train(const Dataset& data, const IpiConfig& config) {
  validate(config);
  const IncrementalSamples samples = extract_samples(data);
  const ThetaEstimate theta =
      batch_ls(samples.regressors, samples.observations, config.ridge);
  return offline_train(samples, theta, config);
}

OfflineResult offline_train(const IncrementalSamples& samples,
                            const ThetaEstimate& theta, const IpiConfig& config) {
  validate(config);
  const CostSpec& cost = config.cost;
  const int n = cost.state_dim();
  if (theta.state_dim() != n || theta.input_dim() != cost.input_dim())
    fail(ErrorCode::kConfiguration, "model and cost dimensions disagree");
  if (samples.policy.empty())
    fail(ErrorCode::kInsufficientExcitation, "dataset has no policy samples");

  const std::size_t count = samples.policy.size();
  std::vector<StateVec> states(count);
  std::vector<ControlVec> inputs(count);
  std::vector<StateVec> next_hats(count);
  for (std::size_t i = 0; i < count; ++i) states[i] = samples.policy[i].x;

  OfflineResult result;
  result.theta = theta;
  result.history.probe_states = config.probe.states(n);

  // Initial evaluation of h0 with tail W0.
  const QuadraticKernel w0(config.initial_kernel_scale * Matrix::Identity(n, n),
                           cost.gamma);
  for (std::size_t i = 0; i < count; ++i) {
    const PolicySample& s = samples.policy[i];
    inputs[i] = config.initial_gain * s.x;
    next_hats[i] = predict_next_state(s.x, s.dx, inputs[i] - s.u_prev, theta);
  }
  KernelFit fit = fit_kernel_batch(states, inputs, next_hats, w0, cost);
  append_record(result.history, fit.kernel,
                (fit.kernel.matrix() - w0.matrix()).norm(), fit.psd_warning);
  QuadraticKernel current = fit.kernel;

  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    QuadraticKernel used = current;
    if (!used.is_psd()) {
      used = project_psd(used);
      ++result.psd_projections;
    }
    for (std::size_t i = 0; i < count; ++i) {
      const PolicySample& s = samples.policy[i];
      const ControlVec du =
          improve_policy_increment(s.x, s.dx, s.u_prev, theta, used, cost);
      inputs[i] = s.u_prev + du;
      next_hats[i] = predict_next_state(s.x, s.dx, du, theta);
    }
    fit = fit_kernel_batch(states, inputs, next_hats, used, cost);
    const double delta = (fit.kernel.matrix() - current.matrix()).norm();
    append_record(result.history, fit.kernel, delta, fit.psd_warning);
    current = fit.kernel;
    if (delta < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.kernel = current;
  return result;
}

}  // namespace ipi
