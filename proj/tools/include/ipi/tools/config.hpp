#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ipi/ipi.hpp"

namespace ipi::tools {

enum class ExperimentKind { kOffline, kOnline, kVerify };

std::string_view to_string(ExperimentKind kind);

struct PlantSpec {
  std::string model = "model_a";  // model_a | model_b | model_a_linear
  bool disturbance = true;
  double noise_std = 1.0;
  double input_bound = 0.0;
};

struct SimSpec {
  std::size_t horizon = 200;
  StateVec x0 = (StateVec(2) << 0.5, 0.0).finished();
  std::uint64_t seed = 1;
  double dt = 1.0;
  double blowup_radius = 1e6;
};

struct StabilitySpec {
  double delta = 0.3;
  std::size_t settle_step = 300;
  double growth_factor = 5.0;
  double final_radius = 1e-2;  // offline rollout check: ||x_k|| below this
  std::size_t final_from = 100;  // for k >= final_from
};

struct VerifySpec {
  std::size_t argmin_states = 100;
  double argmin_bound = 5.0;
  double argmin_step = 1e-3;
  double argmin_tolerance = 2e-3;
  std::size_t ime_horizon = 30;
  double oracle_tolerance = 1e-3;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::kOffline;
  PlantSpec plant;
  IpiConfig ipi;  // carries cost, tolerance, probe grid, initial policy
  RlsConfig identifier;
  OnlineConfig online;
  std::string baseline_dir;
  ExcitationDataSpec data;
  SimSpec sim;
  StabilitySpec stability;
  VerifySpec verify;
  std::size_t ime_window = 50;
  std::string output_dir = "out";

  ExperimentConfig();
};

/// Raw key=value document. Lines are `key = value`; '#' starts a comment.
using ConfigEntries = std::map<std::string, std::string>;

ConfigEntries parse_entries(std::string_view text);

/// IPI_<SECTION>_<KEY> -> section.key, lowercased.
ConfigEntries environment_overrides(char** envp);

/// Parses, applies overrides (later wins), validates. Unknown keys are
/// configuration errors.
ExperimentConfig parse_config(std::string_view text,
                              const ConfigEntries& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const ConfigEntries& overrides = {});

void validate(const ExperimentConfig& config);

/// Every key in a fixed order, values in shortest round-trip form.
std::string serialize(const ExperimentConfig& config);

std::vector<std::string> known_keys();

std::unique_ptr<Plant> make_plant(const ExperimentConfig& config);

}  // namespace ipi::tools
