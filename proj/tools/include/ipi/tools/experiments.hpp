#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ipi/oracle.hpp"
#include "ipi/tools/config.hpp"

namespace ipi::tools {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitInsufficientExcitation = 3,
  kExitUnconverged = 4,
  kExitBundle = 5,
  kExitDiverged = 6,
  kExitCheckFailed = 7,
  kExitInput = 8,
};

int exit_code_for(const Error& error);

struct ReportItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Human-readable PASS/FAIL lines followed by machine-readable key=value
/// lines.
struct Report {
  std::string title;
  std::vector<ReportItem> items;
  std::vector<std::pair<std::string, std::string>> values;

  void item(std::string name, bool passed, std::string detail);
  void value(std::string key, double v);
  void value(std::string key, std::string v);
  bool all_passed() const;
  std::string text() const;
};

struct RunResult {
  int exit_code = kExitOk;
  Report report;
  std::filesystem::path out_dir;
};

/// Each run writes its bundle under config.output_dir and returns the exit
/// status it maps to. Library errors propagate as ipi::Error.
RunResult run_offline(const ExperimentConfig& config);
RunResult run_online(const ExperimentConfig& config,
                     const std::filesystem::path& baseline);
RunResult run_verify(const ExperimentConfig& config);

/// Dispatches on config.kind; online runs fall back to online.baseline.
RunResult run_experiment(const ExperimentConfig& config,
                         const std::filesystem::path& baseline = {});

enum class PlotKind { kTrajectory, kHistory, kKernel };

PlotKind parse_plot_kind(const std::string& name);

struct PlotOptions {
  std::optional<double> delta;
};

/// Reads a CSV of the given kind and renders it; schema mismatches and empty
/// files raise input errors.
std::string emit_plot(const std::filesystem::path& csv, PlotKind kind,
                      const PlotOptions& options = {});
std::string plot_trajectory(const Trajectory& trajectory, const PlotOptions& options = {});

struct SweepOutcome {
  std::string config;
  int exit_code = kExitOk;
  std::string summary;
};

/// Runs independent configs on up to `jobs` worker threads. Output
/// directories must be distinct.
std::vector<SweepOutcome> run_sweep(const std::vector<ExperimentConfig>& configs,
                                    const std::vector<std::string>& labels,
                                    unsigned jobs,
                                    const std::filesystem::path& baseline = {});

/// Model the verify run compares against: the plant itself when linear,
/// otherwise its Jacobian at the origin.
oracle::LinearPlant reference_linearization(const ExperimentConfig& config);

}  // namespace ipi::tools
