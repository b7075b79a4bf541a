#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ipi/tools/bundle.hpp"
#include "ipi/tools/experiments.hpp"

extern char** environ;

namespace {

using namespace ipi::tools;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config, environment_overrides(environ));
  if (c.seed) cfg.sim.seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

int finish(const RunResult& r) {
  std::cout << r.report.text();
  std::cout << "bundle: " << r.out_dir.string() << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental policy iteration experiments"};
  app.require_subcommand(1);

  Common offline_opts, online_opts, verify_opts, sweep_opts;
  std::string baseline, sweep_baseline, plot_input, plot_kind, plot_out;
  std::optional<double> plot_delta;
  std::vector<std::string> sweep_configs;
  unsigned jobs = 1;

  auto add_common = [](CLI::App* sub, Common& c, bool config_required) {
    auto* opt = sub->add_option("--config", c.config, "Experiment config file");
    if (config_required) opt->required();
    sub->add_option("--seed", c.seed, "Override sim.seed");
    sub->add_option("--out", c.out, "Override output.dir");
  };

  auto* offline = app.add_subcommand("offline", "Collect excitation data and train offline");
  add_common(offline, offline_opts, true);
  auto* online = app.add_subcommand("online", "Run online adaptation from a baseline bundle");
  add_common(online, online_opts, true);
  online->add_option("--baseline", baseline, "Offline bundle directory");
  auto* verify = app.add_subcommand("verify", "Check the learner against the linear oracles");
  add_common(verify, verify_opts, true);
  auto* plot = app.add_subcommand("plot", "Render a trajectory or history CSV as SVG");
  plot->add_option("--input", plot_input, "CSV file")->required();
  plot->add_option("--kind", plot_kind, "trajectory, history or kernel")->required();
  plot->add_option("--out", plot_out, "SVG file to write")->required();
  plot->add_option("--delta", plot_delta, "Draw the +/-delta band on state plots");
  auto* sweep = app.add_subcommand("sweep", "Run several configs in parallel");
  sweep->add_option("--config", sweep_configs, "Config files")->required();
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--baseline", sweep_baseline, "Baseline bundle for online configs");
  sweep->add_option("--seed", sweep_opts.seed, "Override sim.seed for every config");
  sweep->add_option("--out", sweep_opts.out, "Parent directory; each run writes <out>/<name>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*offline) return finish(run_offline(load(offline_opts)));
    if (*online) {
      const ExperimentConfig cfg = load(online_opts);
      return finish(run_online(cfg, baseline.empty() ? cfg.baseline_dir : baseline));
    }
    if (*verify) return finish(run_verify(load(verify_opts)));
    if (*plot) {
      write_file(plot_out, emit_plot(plot_input, parse_plot_kind(plot_kind), {plot_delta}));
      std::cout << "wrote " << plot_out << "\n";
      return kExitOk;
    }
    if (*sweep) {
      std::vector<ExperimentConfig> configs;
      for (const std::string& path : sweep_configs) {
        Common c{path, sweep_opts.seed, {}};
        ExperimentConfig cfg = load(c);
        if (!sweep_opts.out.empty())
          cfg.output_dir = (std::filesystem::path(sweep_opts.out) / cfg.name).string();
        configs.push_back(std::move(cfg));
      }
      const auto outcomes = run_sweep(configs, sweep_configs, jobs, sweep_baseline);
      int status = kExitOk;
      for (const SweepOutcome& o : outcomes) {
        std::cout << "### " << o.config << " (exit " << o.exit_code << ")\n" << o.summary;
        if (!o.summary.empty() && o.summary.back() != '\n') std::cout << '\n';
        if (o.exit_code != kExitOk && status == kExitOk) status = o.exit_code;
      }
      return status;
    }
  } catch (const ipi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
