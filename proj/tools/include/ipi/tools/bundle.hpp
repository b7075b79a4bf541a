#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ipi/ipi.hpp"

namespace ipi::tools {

inline constexpr int kArtifactVersion = 1;
inline constexpr const char* kArtifactFormat = "ipi-artifact";

struct IdentifierState {
  ThetaEstimate theta;
  Matrix covariance;
  double forgetting = 0.98;
  std::size_t steps = 0;
};

struct Artifact {
  std::string experiment;
  std::string kind;
  std::string config_sha256;
  IdentifierState identifier;
  QuadraticKernel kernel;
  bool converged = false;
  std::size_t iterations = 0;
};

std::string artifact_to_json(const Artifact& artifact);
/// Throws incompatible-bundle on a wrong format tag or version.
Artifact artifact_from_json(std::string_view text);

/// Reads <dir>/artifact.json. Missing directory or file: missing-bundle.
Artifact load_bundle(const std::filesystem::path& dir);

std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

/// manifest.json listing each file with its size and SHA-256.
void write_manifest(const std::filesystem::path& dir,
                    const std::vector<std::string>& files);

}  // namespace ipi::tools
