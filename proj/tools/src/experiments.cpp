#include "ipi/tools/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <random>

#include <boost/random/uniform_real_distribution.hpp>

#include "ipi/linalg.hpp"
#include "ipi/tools/bundle.hpp"
#include "ipi/tools/svg.hpp"

namespace ipi::tools {

int exit_code_for(const Error& error) {
  switch (error.code()) {
    case ErrorCode::kConfiguration:
    case ErrorCode::kPrecondition:
      return kExitConfig;
    case ErrorCode::kInsufficientExcitation:
      return kExitInsufficientExcitation;
    case ErrorCode::kMissingBundle:
    case ErrorCode::kIncompatibleBundle:
      return kExitBundle;
    case ErrorCode::kEvaluationDiverges:
      return kExitDiverged;
    case ErrorCode::kInput:
    case ErrorCode::kIo:
      return kExitInput;
    case ErrorCode::kOracleFailure:
    case ErrorCode::kBoundUndefined:
    case ErrorCode::kIdentifierDegraded:
    case ErrorCode::kPolicyImprovement:
      return kExitCheckFailed;
  }
  return kExitFailure;
}

void Report::item(std::string name, bool passed, std::string detail) {
  items.push_back({std::move(name), passed, std::move(detail)});
}

void Report::value(std::string key, double v) { values.emplace_back(std::move(key), format_double(v)); }

void Report::value(std::string key, std::string v) { values.emplace_back(std::move(key), std::move(v)); }

bool Report::all_passed() const {
  return std::all_of(items.begin(), items.end(), [](const ReportItem& i) { return i.passed; });
}

std::string Report::text() const {
  std::ostringstream out;
  out << "== " << title << " ==\n";
  for (const ReportItem& i : items)
    out << (i.passed ? "[PASS] " : "[FAIL] ") << i.name << "  " << i.detail << '\n';
  out << (all_passed() ? "result: PASS\n" : "result: FAIL\n");
  out << "--\n";
  for (const auto& [k, v] : values) out << k << '=' << v << '\n';
  return out.str();
}

namespace {

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

struct Bundle {
  std::filesystem::path dir;
  std::vector<std::string> files;

  void put(const std::string& name, std::string_view data) {
    write_file(dir / name, data);
    files.push_back(name);
  }
  void seal() { write_manifest(dir, files); }
};

std::string config_hash(const ExperimentConfig& config) {
  return sha256_hex(serialize(config));
}

RolloutOptions rollout_options(const ExperimentConfig& config) {
  RolloutOptions opts;
  opts.blowup_radius = config.sim.blowup_radius;
  opts.input_bound = config.plant.input_bound;
  opts.cost = config.ipi.cost;
  opts.meta.config_hash = config_hash(config);
  return opts;
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream out;
  write_trajectory_csv(out, t);
  return out.str();
}

Matrix batch_covariance(const IncrementalSamples& samples, double ridge) {
  const auto d = samples.regressors.front().size();
  Matrix gram = ridge * Matrix::Identity(d, d);
  for (const Vector& x : samples.regressors) gram += x * x.transpose();
  return symmetrize(gram.inverse());
}

std::vector<Series> kernel_series(const TrainingHistory& history) {
  const int n = history.records.empty() ? 2 : history.records.front().kernel.dim();
  std::vector<Series> out;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Series s;
      s.name = "p" + std::to_string(i + 1) + std::to_string(j + 1);
      for (const TrainingRecord& r : history.records) {
        s.x.push_back(static_cast<double>(r.iteration));
        s.y.push_back(r.kernel.matrix()(i, j));
      }
      out.push_back(std::move(s));
    }
  return out;
}

std::string plot_history(const TrainingHistory& history) {
  LineChart entries{"Kernel entries per iteration", "iteration", "P(i)", kernel_series(history), {}, false};
  Series delta{"||P(i)-P(i-1)||_F", {}, {}};
  for (const TrainingRecord& r : history.records) {
    delta.x.push_back(static_cast<double>(r.iteration));
    delta.y.push_back(r.delta_frobenius);
  }
  LineChart conv{"Kernel change", "iteration", "log10 Frobenius delta", {delta}, {}, true};
  return render_svg_panels({entries, conv});
}

}  // namespace

std::string plot_trajectory(const Trajectory& trajectory, const PlotOptions& options) {
  if (trajectory.records.empty()) fail(ErrorCode::kInput, "trajectory is empty");
  Series x1{"x1", {}, {}}, x2{"x2", {}, {}}, norm{"||x||", {}, {}}, du{"du", {}, {}};
  for (const TrajectoryRecord& r : trajectory.records) {
    const double k = static_cast<double>(r.k);
    x1.x.push_back(k);
    x1.y.push_back(r.x(0));
    x2.x.push_back(k);
    x2.y.push_back(r.x(1));
    norm.x.push_back(k);
    norm.y.push_back(r.x.norm());
    du.x.push_back(k);
    du.y.push_back(r.du(0));
  }
  LineChart states{"State response", "k", "state", {x1, x2, norm}, {}, false};
  if (options.delta) {
    states.markers.push_back({"delta", *options.delta});
    states.markers.push_back({"-delta", -*options.delta});
  }
  LineChart control{"Incremental control", "k", "du", {du}, {}, false};
  return render_svg_panels({states, control});
}

oracle::LinearPlant reference_linearization(const ExperimentConfig& config) {
  Matrix B(2, 1);
  B << 0.0, 1.0;
  Matrix A(2, 2);
  if (config.plant.model == "model_a_linear") {
    A << 0.0, 1.0, -2.0, -3.0;
  } else if (config.plant.model == "model_a") {
    A << 0.0, 1.0, -2.0 + std::cos(0.0), -3.0;
  } else {
    A << 0.0, 1.0, -2.0 + std::cos(0.0), -0.5;
    B << 0.0, 0.2;
  }
  return {A, B};
}

RunResult run_offline(const ExperimentConfig& config) {
  RunResult run;
  run.out_dir = config.output_dir;
  Report& rep = run.report;
  rep.title = "offline: " + config.name;

  const auto plant = make_plant(config);
  const Dataset data = collect_excitation_data(*plant, config.data, config.sim.seed);
  const IncrementalSamples samples = extract_samples(data);
  const ThetaEstimate theta =
      batch_ls(samples.regressors, samples.observations, config.ipi.ridge);
  const OfflineResult result = offline_train(samples, theta, config.ipi);
  const MonotonicityReport mono = check_monotonicity(result.history);

  IncrementalPolicy policy(result.theta, project_psd(result.kernel), config.ipi.cost,
                           config.plant.input_bound);
  const Trajectory traj = rollout(*plant, policy, config.sim.x0, config.sim.horizon,
                                  config.sim.seed, rollout_options(config));
  double tail_max = 0.0;
  for (const TrajectoryRecord& r : traj.records)
    if (r.k >= config.stability.final_from) tail_max = std::max(tail_max, r.x.norm());
  const bool tail_covered = !traj.records.empty() &&
                            traj.records.back().k >= config.stability.final_from;
  const std::size_t iterations = result.history.records.size() - 1;
  const double last_delta = result.history.records.back().delta_frobenius;

  rep.item("convergence", result.converged,
           "iterations=" + std::to_string(iterations) + " delta=" + sci(last_delta) +
               " tol=" + sci(config.ipi.tolerance));
  rep.item("monotonicity", mono.passed,
           "max_increase=" + sci(mono.max_increase) + " max_excess=" + sci(mono.max_excess));
  rep.item("closed_loop", !traj.diverged && tail_covered && tail_max < config.stability.final_radius,
           "max ||x_k|| for k>=" + std::to_string(config.stability.final_from) + " is " +
               sci(tail_max) + (traj.diverged ? " (diverged)" : ""));

  rep.value("offline.samples", std::to_string(samples.policy.size()));
  rep.value("offline.converged", result.converged ? "true" : "false");
  rep.value("offline.iterations", std::to_string(iterations));
  rep.value("offline.final_delta", last_delta);
  rep.value("offline.psd_projections", std::to_string(result.psd_projections));
  rep.value("offline.monotonicity.max_increase", mono.max_increase);
  rep.value("offline.monotonicity.max_excess", mono.max_excess);
  rep.value("offline.rollout.diverged", traj.diverged ? "true" : "false");
  rep.value("offline.rollout.tail_max_norm", tail_max);
  const Matrix& P = result.kernel.matrix();
  rep.value("offline.kernel.p11", P(0, 0));
  rep.value("offline.kernel.p12", P(0, 1));
  rep.value("offline.kernel.p22", P(1, 1));
  const Matrix a = result.theta.A_hat();
  const Matrix b = result.theta.B_hat();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      rep.value("offline.a_hat." + std::to_string(i + 1) + std::to_string(j + 1), a(i, j));
    rep.value("offline.b_hat." + std::to_string(i + 1) + "1", b(i, 0));
  }

  Artifact art;
  art.experiment = config.name;
  art.kind = "offline";
  art.config_sha256 = config_hash(config);
  art.identifier = {result.theta, batch_covariance(samples, config.ipi.ridge),
                    config.identifier.forgetting, samples.regressors.size()};
  art.kernel = result.kernel;
  art.converged = result.converged;
  art.iterations = iterations;

  Bundle bundle{config.output_dir, {}};
  bundle.put("config.cfg", serialize(config));
  bundle.put("artifact.json", artifact_to_json(art));
  std::ostringstream hist, curve;
  write_history_csv(hist, result.history);
  write_kernel_curve_csv(curve, result.history);
  bundle.put("history.csv", hist.str());
  bundle.put("kernel_curve.csv", curve.str());
  bundle.put("rollout.csv", trajectory_csv(traj));
  bundle.put("training_curve.svg", plot_history(result.history));
  bundle.put("rollout.svg", plot_trajectory(traj, {config.stability.final_radius}));
  bundle.put("report.txt", rep.text());
  bundle.seal();

  if (!result.converged) run.exit_code = kExitUnconverged;
  else if (traj.diverged) run.exit_code = kExitDiverged;
  else if (!rep.all_passed()) run.exit_code = kExitCheckFailed;
  return run;
}

RunResult run_online(const ExperimentConfig& config, const std::filesystem::path& baseline) {
  RunResult run;
  run.out_dir = config.output_dir;
  Report& rep = run.report;
  rep.title = "online: " + config.name;

  const Artifact base = load_bundle(baseline);
  const auto plant = make_plant(config);
  if (base.identifier.theta.state_dim() != plant->state_dim() ||
      base.identifier.theta.input_dim() != plant->input_dim())
    fail(ErrorCode::kIncompatibleBundle, "baseline dimensions do not match the plant");
  if (std::abs(base.kernel.gamma() - config.ipi.cost.gamma) > 1e-12)
    fail(ErrorCode::kIncompatibleBundle,
         "baseline was trained with gamma=" + format_double(base.kernel.gamma()) +
             ", config has " + format_double(config.ipi.cost.gamma));

  OnlineConfig oc = config.online;
  oc.identifier = config.identifier;
  oc.input_bound = config.plant.input_bound;
  OnlineController controller(
      OnlineAdapter(base.identifier.theta, base.kernel, config.ipi.cost, oc));
  const Trajectory traj = rollout(*plant, controller, config.sim.x0, config.sim.horizon,
                                  config.sim.seed, rollout_options(config));
  const SettleReport settle = analyze_settling(traj, StabilityIndicator{config.stability.delta},
                                               config.stability.settle_step,
                                               config.stability.growth_factor);
  const OnlineAdapter& adapter = controller.adapter();

  rep.item("no_divergence", !traj.diverged,
           "records=" + std::to_string(traj.size()) + " horizon=" + std::to_string(config.sim.horizon));
  rep.item("bounded", settle.bounded,
           "max ||x||=" + sci(settle.max_sigma) + " limit=" +
               sci(config.stability.growth_factor * settle.initial_sigma));
  const bool covers = traj.records.back().k >= config.stability.settle_step;
  rep.item("settled", !traj.diverged && covers && settle.violations_after == 0,
           "violations of ||x||<=" + format_double(config.stability.delta) + " for k>=" +
               std::to_string(config.stability.settle_step) + ": " +
               std::to_string(settle.violations_after));

  rep.value("online.seed", std::to_string(config.sim.seed));
  rep.value("online.diverged", traj.diverged ? "true" : "false");
  rep.value("online.max_norm", settle.max_sigma);
  rep.value("online.final_norm", settle.final_sigma);
  rep.value("online.violations_after_settle", std::to_string(settle.violations_after));
  rep.value("online.entry_step", settle.entry_step ? std::to_string(*settle.entry_step) : "none");
  rep.value("online.held_steps", std::to_string(adapter.held_steps()));
  rep.value("online.identifier_clip_events", std::to_string(adapter.identifier().clip_events()));

  Artifact art;
  art.experiment = config.name;
  art.kind = "online";
  art.config_sha256 = config_hash(config);
  art.identifier = {adapter.theta(), adapter.identifier().covariance(),
                    adapter.identifier().config().forgetting, adapter.identifier().steps()};
  art.kernel = QuadraticKernel(adapter.kernel().matrix(), config.ipi.cost.gamma);
  art.converged = base.converged;
  art.iterations = base.iterations;

  Bundle bundle{config.output_dir, {}};
  bundle.put("config.cfg", serialize(config));
  bundle.put("artifact.json", artifact_to_json(art));
  bundle.put("trajectory.csv", trajectory_csv(traj));
  bundle.put("response.svg", plot_trajectory(traj, {config.stability.delta}));
  bundle.put("report.txt", rep.text());
  bundle.seal();

  if (traj.diverged) run.exit_code = kExitDiverged;
  else if (!rep.all_passed()) run.exit_code = kExitCheckFailed;
  return run;
}

RunResult run_verify(const ExperimentConfig& config) {
  RunResult run;
  run.out_dir = config.output_dir;
  Report& rep = run.report;
  rep.title = "verify: " + config.name;
  const CostSpec& cost = config.ipi.cost;

  const auto plant = make_plant(config);
  const Dataset data = collect_excitation_data(*plant, config.data, config.sim.seed);
  const OfflineResult result = offline_train(data, config.ipi);
  const std::size_t iterations = result.history.records.size() - 1;
  rep.item("convergence", result.converged,
           "iterations=" + std::to_string(iterations) +
               " delta=" + sci(result.history.records.back().delta_frobenius));

  // Linear-case oracle, then the bound check with eps_IME measured on
  // closed-loop rollouts of the learned policy from every probe state.
  const oracle::LinearPlant reference = reference_linearization(config);
  std::optional<oracle::RiccatiSolution> star;
  std::string oracle_error;
  try {
    star = oracle::discounted_riccati(reference, cost);
  } catch (const Error& e) {
    oracle_error = e.what();
  }
  if (star) {
    const double rel =
        (result.kernel.matrix() - star->P.matrix()).norm() / star->P.matrix().norm();
    rep.item("oracle_equivalence", rel <= config.verify.oracle_tolerance,
             "relative Frobenius error=" + sci(rel) +
                 " tol=" + sci(config.verify.oracle_tolerance));
    rep.value("verify.relative_error", rel);
    rep.value("verify.pstar.p11", star->P.matrix()(0, 0));
    rep.value("verify.pstar.p12", star->P.matrix()(0, 1));
    rep.value("verify.pstar.p22", star->P.matrix()(1, 1));

    const std::vector<StateVec> probe = config.ipi.probe.states(cost.state_dim());
    double eps = 0.0;
    IncrementalPolicy policy(result.theta, project_psd(result.kernel), cost,
                             config.plant.input_bound);
    for (const StateVec& x0 : probe) {
      policy.reset();
      const Trajectory t = rollout(*plant, policy, x0, config.verify.ime_horizon,
                                   config.sim.seed, rollout_options(config));
      if (t.size() >= 3) eps = std::max(eps, estimate_ime(t, result.theta, t.size() - 1));
    }
    const double lip = cost.state_lipschitz(config.ipi.probe.radius(cost.state_dim()));
    const NearOptimalityReport near =
        near_optimality_gap(result.kernel, star->P, probe, cost, eps, lip);
    rep.item("near_optimality", near.within_bound,
             "gap=" + sci(near.gap) + " bound=" + sci(near.bound) + " eps_ime=" + sci(eps));
    rep.value("verify.eps_ime", eps);
    rep.value("verify.lipschitz", lip);
    rep.value("verify.gap", near.gap);
    rep.value("verify.bound", near.bound);
  } else {
    rep.item("oracle_equivalence", false, oracle_error);
    rep.item("near_optimality", false, "no oracle solution");
  }

  const MonotonicityReport mono = check_monotonicity(result.history);
  rep.item("monotonicity", mono.passed,
           "max_increase=" + sci(mono.max_increase) + " max_excess=" + sci(mono.max_excess));
  rep.value("verify.monotonicity.max_excess", mono.max_excess);

  // Closed form against exhaustive search over du.
  std::mt19937_64 engine(config.sim.seed);
  boost::random::uniform_real_distribution<double> unit(-1.0, 1.0);
  const QuadraticKernel used = project_psd(result.kernel);
  double worst = 0.0;
  std::size_t outside = 0;
  for (std::size_t s = 0; s < config.verify.argmin_states; ++s) {
    StateVec x(2), dx(2);
    x << unit(engine), unit(engine);
    dx << 0.2 * unit(engine), 0.2 * unit(engine);
    const ControlVec u_prev = ControlVec::Constant(1, unit(engine));
    const double closed =
        improve_policy_increment(x, dx, u_prev, result.theta, used, cost)(0);
    if (std::abs(closed) > config.verify.argmin_bound) {
      ++outside;
      continue;
    }
    const double grid = oracle::brute_force_argmin(
        [&](double du) {
          const ControlVec d = ControlVec::Constant(1, du);
          return bellman_target(x, u_prev + d, predict_next_state(x, dx, d, result.theta),
                                used, cost);
        },
        -config.verify.argmin_bound, config.verify.argmin_bound, config.verify.argmin_step);
    worst = std::max(worst, std::abs(grid - closed));
  }
  rep.item("argmin_cross_check", worst <= config.verify.argmin_tolerance && outside == 0,
           "max |closed-form - grid|=" + sci(worst) + " over " +
               std::to_string(config.verify.argmin_states) + " states");
  rep.value("verify.argmin.max_difference", worst);

  Bundle bundle{config.output_dir, {}};
  bundle.put("config.cfg", serialize(config));
  std::ostringstream hist;
  write_history_csv(hist, result.history);
  bundle.put("history.csv", hist.str());
  bundle.put("report.txt", rep.text());
  bundle.seal();

  run.exit_code = rep.all_passed() ? kExitOk : kExitCheckFailed;
  return run;
}

RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& baseline) {
  switch (config.kind) {
    case ExperimentKind::kOffline: return run_offline(config);
    case ExperimentKind::kVerify: return run_verify(config);
    case ExperimentKind::kOnline:
      return run_online(config, baseline.empty() ? std::filesystem::path(config.baseline_dir)
                                                 : baseline);
  }
  fail(ErrorCode::kConfiguration, "unknown experiment kind");
}

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "trajectory") return PlotKind::kTrajectory;
  if (name == "history") return PlotKind::kHistory;
  if (name == "kernel") return PlotKind::kKernel;
  fail(ErrorCode::kInput, "unknown plot kind '" + name + "' (trajectory, history, kernel)");
}

namespace {

std::vector<std::vector<double>> read_numeric_csv(std::istream& in, const std::string& header) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kInput, "CSV is empty");
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  if (line != header) fail(ErrorCode::kInput, "CSV header must be " + header);
  const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) {
      while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size())
        fail(ErrorCode::kInput, "line " + std::to_string(lineno) + ": bad number '" + f + "'");
      row.push_back(v);
    }
    if (row.size() != columns)
      fail(ErrorCode::kInput, "line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(columns) + " fields");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::kInput, "CSV has no data rows");
  return rows;
}

}  // namespace

std::string emit_plot(const std::filesystem::path& csv, PlotKind kind, const PlotOptions& options) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) fail(ErrorCode::kInput, "cannot open " + csv.string());
  switch (kind) {
    case PlotKind::kTrajectory:
      return plot_trajectory(read_trajectory_csv(in), options);
    case PlotKind::kHistory: {
      const auto rows =
          read_numeric_csv(in, "iteration,p11,p12,p22,delta_frobenius,probe_value_max");
      TrainingHistory h;
      for (const auto& r : rows) {
        TrainingRecord rec;
        rec.iteration = static_cast<std::size_t>(r[0]);
        rec.kernel = QuadraticKernel((Matrix(2, 2) << r[1], r[2], r[2], r[3]).finished());
        rec.delta_frobenius = r[4];
        h.records.push_back(std::move(rec));
      }
      return plot_history(h);
    }
    case PlotKind::kKernel: {
      const auto rows = read_numeric_csv(in, "p11,p12,p22,iteration");
      TrainingHistory h;
      for (const auto& r : rows) {
        TrainingRecord rec;
        rec.iteration = static_cast<std::size_t>(r[3]);
        rec.kernel = QuadraticKernel((Matrix(2, 2) << r[0], r[1], r[1], r[2]).finished());
        h.records.push_back(std::move(rec));
      }
      LineChart chart{"Kernel training curve", "iteration", "P(i)", kernel_series(h), {}, false};
      return render_svg(chart);
    }
  }
  fail(ErrorCode::kInput, "unknown plot kind");
}

std::vector<SweepOutcome> run_sweep(const std::vector<ExperimentConfig>& configs,
                                    const std::vector<std::string>& labels, unsigned jobs,
                                    const std::filesystem::path& baseline) {
  std::set<std::string> dirs;
  for (const ExperimentConfig& c : configs) {
    const std::string dir = std::filesystem::weakly_canonical(c.output_dir).string();
    if (!dirs.insert(dir).second)
      fail(ErrorCode::kConfiguration, "sweep configs share output directory " + c.output_dir);
  }
  std::vector<SweepOutcome> outcomes(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      SweepOutcome& out = outcomes[i];
      out.config = i < labels.size() ? labels[i] : configs[i].name;
      try {
        const RunResult r = run_experiment(configs[i], baseline);
        out.exit_code = r.exit_code;
        out.summary = r.report.text();
      } catch (const Error& e) {
        out.exit_code = exit_code_for(e);
        out.summary = e.what();
      } catch (const std::exception& e) {
        out.exit_code = kExitFailure;
        out.summary = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return outcomes;
}

}  // namespace ipi::tools
