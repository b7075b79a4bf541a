#include "ipi/tools/bundle.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>
#include <nlohmann/json.hpp>

namespace ipi::tools {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Matrix matrix_from_json(const json& j, const char* what) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size())
    fail(ErrorCode::kIncompatibleBundle, std::string(what) + " has inconsistent shape");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2)
      m(i, j2) = data[static_cast<std::size_t>(i * cols + j2)];
  return m;
}

}  // namespace

std::string artifact_to_json(const Artifact& a) {
  json j;
  j["format"] = kArtifactFormat;
  j["version"] = kArtifactVersion;
  j["experiment"] = a.experiment;
  j["kind"] = a.kind;
  j["config_sha256"] = a.config_sha256;
  j["identifier"] = {
      {"state_dim", a.identifier.theta.state_dim()},
      {"input_dim", a.identifier.theta.input_dim()},
      {"theta", matrix_to_json(a.identifier.theta.matrix())},
      {"covariance", matrix_to_json(a.identifier.covariance)},
      {"forgetting", a.identifier.forgetting},
      {"steps", a.identifier.steps},
  };
  j["kernel"] = {{"gamma", a.kernel.gamma()}, {"P", matrix_to_json(a.kernel.matrix())}};
  j["converged"] = a.converged;
  j["iterations"] = a.iterations;
  return j.dump(2) + "\n";
}

Artifact artifact_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kIncompatibleBundle, std::string("artifact is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kArtifactFormat)
      fail(ErrorCode::kIncompatibleBundle, "artifact has an unknown format tag");
    const int version = j.at("version").get<int>();
    if (version != kArtifactVersion)
      fail(ErrorCode::kIncompatibleBundle,
           "artifact version " + std::to_string(version) + " is not supported (expected " +
               std::to_string(kArtifactVersion) + ")");
    Artifact a;
    a.experiment = j.at("experiment").get<std::string>();
    a.kind = j.at("kind").get<std::string>();
    a.config_sha256 = j.at("config_sha256").get<std::string>();
    const json& id = j.at("identifier");
    const int nx = id.at("state_dim").get<int>();
    a.identifier.theta = ThetaEstimate(matrix_from_json(id.at("theta"), "theta"), nx);
    a.identifier.covariance = matrix_from_json(id.at("covariance"), "covariance");
    a.identifier.forgetting = id.at("forgetting").get<double>();
    a.identifier.steps = id.at("steps").get<std::size_t>();
    if (a.identifier.theta.input_dim() != id.at("input_dim").get<int>())
      fail(ErrorCode::kIncompatibleBundle, "identifier dimensions disagree");
    const json& k = j.at("kernel");
    a.kernel = QuadraticKernel(matrix_from_json(k.at("P"), "kernel"), k.at("gamma").get<double>());
    if (a.kernel.dim() != nx)
      fail(ErrorCode::kIncompatibleBundle, "kernel and identifier dimensions disagree");
    a.converged = j.at("converged").get<bool>();
    a.iterations = j.at("iterations").get<std::size_t>();
    return a;
  } catch (const json::exception& e) {
    fail(ErrorCode::kIncompatibleBundle, std::string("artifact is malformed: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIncompatibleBundle) throw;
    fail(ErrorCode::kIncompatibleBundle, e.what());
  }
}

Artifact load_bundle(const std::filesystem::path& dir) {
  if (dir.empty()) fail(ErrorCode::kMissingBundle, "no baseline bundle given");
  const auto file = dir / "artifact.json";
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec))
    fail(ErrorCode::kMissingBundle, "baseline bundle not found: " + file.string());
  return artifact_from_json(read_file(file));
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::kIo, "SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::kIo, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

void write_manifest(const std::filesystem::path& dir,
                    const std::vector<std::string>& files) {
  json entries = json::array();
  for (const std::string& name : files) {
    const std::string data = read_file(dir / name);
    entries.push_back({{"file", name}, {"bytes", data.size()}, {"sha256", sha256_hex(data)}});
  }
  json manifest{{"format", "ipi-manifest"}, {"version", kArtifactVersion}, {"files", entries}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace ipi::tools
