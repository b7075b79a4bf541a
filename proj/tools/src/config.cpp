#include "ipi/tools/config.hpp"

#include "ipi/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace ipi::tools {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kOffline: return "offline";
    case ExperimentKind::kOnline: return "online";
    case ExperimentKind::kVerify: return "verify";
  }
  return "offline";
}

ExperimentConfig::ExperimentConfig() {
  ipi.cost = CostSpec{Matrix::Identity(2, 2), Matrix::Identity(1, 1), 0.7};
  ipi.initial_gain = (Matrix(1, 2) << -2.5, -1.0).finished();
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& why) {
  fail(ErrorCode::kConfiguration,
       "key '" + key + "': cannot use value '" + value + "' (" + why + ")");
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const std::string t = trim(v);
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  if (t.empty() || res.ec != std::errc() || res.ptr != last)
    bad_value(key, v, "expected a number");
  if (!std::isfinite(out)) bad_value(key, v, "must be finite");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const std::string t = trim(v);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    bad_value(key, v, "expected a nonnegative integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true") return true;
  if (t == "false") return false;
  bad_value(key, v, "expected true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& item : split(trim(v), ',')) out.push_back(to_double(key, item));
  if (out.empty()) bad_value(key, v, "empty list");
  return out;
}

Matrix to_matrix(const std::string& key, const std::string& v) {
  std::vector<std::vector<double>> rows;
  for (const std::string& row : split(trim(v), ';')) rows.push_back(to_list(key, row));
  if (rows.empty()) bad_value(key, v, "empty matrix");
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) bad_value(key, v, "ragged rows");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

Vector to_vector(const std::string& key, const std::string& v) {
  const std::vector<double> list = to_list(key, v);
  return Eigen::Map<const Vector>(list.data(), static_cast<Eigen::Index>(list.size()));
}

std::string from_list(const std::vector<double>& list) {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ',';
    out += format_double(list[i]);
  }
  return out;
}

std::string from_matrix(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += ';';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
  }
  return out;
}

std::string from_vector(const Vector& v) {
  return from_list(std::vector<double>(v.data(), v.data() + v.size()));
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct KeySpec {
  std::string key;
  Setter set;
  Getter get;
};

#define IPI_DOUBLE(k, field)                                                    \
  KeySpec{k,                                                                    \
          [](ExperimentConfig& c, const std::string& key, const std::string& v) { \
            c.field = to_double(key, v);                                        \
          },                                                                    \
          [](const ExperimentConfig& c) { return format_double(c.field); }}
#define IPI_SIZE(k, field)                                                      \
  KeySpec{k,                                                                    \
          [](ExperimentConfig& c, const std::string& key, const std::string& v) { \
            c.field = static_cast<std::size_t>(to_uint(key, v));                \
          },                                                                    \
          [](const ExperimentConfig& c) { return std::to_string(c.field); }}

std::vector<double> sinusoid_field(const ExperimentConfig& c, double Sinusoid::*f) {
  std::vector<double> out;
  for (const Sinusoid& s : c.data.excitation) out.push_back(s.*f);
  return out;
}

void set_sinusoid_field(ExperimentConfig& c, double Sinusoid::*f,
                        const std::vector<double>& values) {
  if (c.data.excitation.size() < values.size()) c.data.excitation.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) c.data.excitation[i].*f = values[i];
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"experiment.name",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         c.name = trim(v);
         if (c.name.empty()) bad_value(key, v, "must not be empty");
       },
       [](const ExperimentConfig& c) { return c.name; }},
      {"experiment.kind",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         const std::string t = trim(v);
         if (t == "offline") c.kind = ExperimentKind::kOffline;
         else if (t == "online") c.kind = ExperimentKind::kOnline;
         else if (t == "verify") c.kind = ExperimentKind::kVerify;
         else bad_value(key, v, "expected offline, online or verify");
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.kind)); }},
      {"plant.model",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         const std::string t = trim(v);
         if (t != "model_a" && t != "model_b" && t != "model_a_linear")
           bad_value(key, v, "expected model_a, model_b or model_a_linear");
         c.plant.model = t;
       },
       [](const ExperimentConfig& c) { return c.plant.model; }},
      {"plant.disturbance",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         c.plant.disturbance = to_bool(key, v);
       },
       [](const ExperimentConfig& c) { return from_bool(c.plant.disturbance); }},
      IPI_DOUBLE("plant.noise_std", plant.noise_std),
      IPI_DOUBLE("plant.input_bound", plant.input_bound),
      {"cost.q",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         c.ipi.cost.Q = to_matrix(key, v);
       },
       [](const ExperimentConfig& c) { return from_matrix(c.ipi.cost.Q); }},
      {"cost.r",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         c.ipi.cost.R = to_matrix(key, v);
       },
       [](const ExperimentConfig& c) { return from_matrix(c.ipi.cost.R); }},
      IPI_DOUBLE("cost.gamma", ipi.cost.gamma),
      IPI_DOUBLE("rls.forgetting", identifier.forgetting),
      IPI_DOUBLE("rls.initial_cov_scale", identifier.initial_cov_scale),
      IPI_DOUBLE("rls.ridge", ipi.ridge),
      IPI_DOUBLE("kernel.forgetting", online.kernel.forgetting),
      IPI_DOUBLE("kernel.initial_cov_scale", online.kernel.initial_cov_scale),
      IPI_DOUBLE("ipi.tolerance", ipi.tolerance),
      IPI_SIZE("ipi.max_iterations", ipi.max_iterations),
      IPI_SIZE("ipi.probe_points", ipi.probe.points_per_axis),
      IPI_DOUBLE("ipi.probe_half_width", ipi.probe.half_width),
      {"ipi.initial_gain",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         c.ipi.initial_gain = to_matrix(key, v);
       },
       [](const ExperimentConfig& c) { return from_matrix(c.ipi.initial_gain); }},
      IPI_DOUBLE("ipi.initial_kernel_scale", ipi.initial_kernel_scale),
      IPI_SIZE("ipi.ime_window", ime_window),
      {"online.baseline",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.baseline_dir = trim(v);
       },
       [](const ExperimentConfig& c) { return c.baseline_dir; }},
      IPI_SIZE("data.episodes", data.episodes),
      IPI_SIZE("data.episode_length", data.episode_length),
      IPI_DOUBLE("data.initial_radius", data.initial_radius),
      IPI_DOUBLE("data.max_radius", data.max_radius),
      {"excitation.amplitudes",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         set_sinusoid_field(c, &Sinusoid::amplitude, to_list(key, v));
       },
       [](const ExperimentConfig& c) {
         return from_list(sinusoid_field(c, &Sinusoid::amplitude));
       }},
      {"excitation.frequencies",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         set_sinusoid_field(c, &Sinusoid::frequency, to_list(key, v));
       },
       [](const ExperimentConfig& c) {
         return from_list(sinusoid_field(c, &Sinusoid::frequency));
       }},
      {"excitation.phases",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         set_sinusoid_field(c, &Sinusoid::phase, to_list(key, v));
       },
       [](const ExperimentConfig& c) {
         return from_list(sinusoid_field(c, &Sinusoid::phase));
       }},
      IPI_SIZE("sim.horizon", sim.horizon),
      {"sim.x0",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         c.sim.x0 = to_vector(key, v);
       },
       [](const ExperimentConfig& c) { return from_vector(c.sim.x0); }},
      {"sim.seed",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         c.sim.seed = to_uint(key, v);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.sim.seed); }},
      IPI_DOUBLE("sim.dt", sim.dt),
      IPI_DOUBLE("sim.blowup_radius", sim.blowup_radius),
      IPI_DOUBLE("stability.delta", stability.delta),
      IPI_SIZE("stability.settle_step", stability.settle_step),
      IPI_DOUBLE("stability.growth_factor", stability.growth_factor),
      IPI_DOUBLE("stability.final_radius", stability.final_radius),
      IPI_SIZE("stability.final_from", stability.final_from),
      IPI_SIZE("verify.argmin_states", verify.argmin_states),
      IPI_DOUBLE("verify.argmin_bound", verify.argmin_bound),
      IPI_DOUBLE("verify.argmin_step", verify.argmin_step),
      IPI_DOUBLE("verify.argmin_tolerance", verify.argmin_tolerance),
      IPI_SIZE("verify.ime_horizon", verify.ime_horizon),
      IPI_DOUBLE("verify.oracle_tolerance", verify.oracle_tolerance),
      {"output.dir",
       [](ExperimentConfig& c, const std::string& key, const std::string& v) {
         c.output_dir = trim(v);
         if (c.output_dir.empty()) bad_value(key, v, "must not be empty");
       },
       [](const ExperimentConfig& c) { return c.output_dir; }},
  };
  return table;
}

#undef IPI_DOUBLE
#undef IPI_SIZE

const KeySpec* find_key(const std::string& key) {
  for (const KeySpec& spec : key_table())
    if (spec.key == key) return &spec;
  return nullptr;
}

}  // namespace

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const KeySpec& spec : key_table()) out.push_back(spec.key);
  return out;
}

ConfigEntries parse_entries(std::string_view text) {
  ConfigEntries entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::kConfiguration,
           "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty())
      fail(ErrorCode::kConfiguration, "line " + std::to_string(lineno) + ": empty key");
    if (!entries.emplace(key, value).second)
      fail(ErrorCode::kConfiguration,
           "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return entries;
}

ConfigEntries environment_overrides(char** envp) {
  ConfigEntries out;
  if (!envp) return out;
  for (char** e = envp; *e; ++e) {
    const std::string_view entry(*e);
    if (entry.substr(0, 4) != "IPI_") continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    std::string name(entry.substr(4, eq - 4));
    const auto sep = name.find('_');
    if (sep == std::string::npos || sep == 0 || sep + 1 == name.size())
      fail(ErrorCode::kConfiguration,
           "environment variable IPI_" + name + " does not name a section and key");
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    name[sep] = '.';
    out[name] = std::string(entry.substr(eq + 1));
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text, const ConfigEntries& overrides) {
  ConfigEntries entries = parse_entries(text);
  for (const auto& [key, value] : overrides) entries[key] = value;

  ExperimentConfig config;
  const bool sets_excitation = entries.count("excitation.amplitudes") ||
                               entries.count("excitation.frequencies") ||
                               entries.count("excitation.phases");
  if (sets_excitation) config.data.excitation.clear();
  for (const auto& [key, value] : entries) {
    const KeySpec* spec = find_key(key);
    if (!spec) fail(ErrorCode::kConfiguration, "unknown key '" + key + "'");
    spec->set(config, key, value);
  }
  if (sets_excitation) {
    const auto count = [&](const char* key) {
      const auto it = entries.find(key);
      return it == entries.end() ? std::size_t{0}
                                 : to_list(key, it->second).size();
    };
    const std::size_t n = config.data.excitation.size();
    if (count("excitation.amplitudes") != n || count("excitation.frequencies") != n ||
        (entries.count("excitation.phases") && count("excitation.phases") != n))
      fail(ErrorCode::kConfiguration,
           "excitation amplitudes, frequencies and phases must have equal length");
  }
  config.data.dt = config.sim.dt;
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const ConfigEntries& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kConfiguration, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

void validate(const ExperimentConfig& c) {
  const auto plant = make_plant(c);
  const int nx = plant->state_dim();
  const int nu = plant->input_dim();
  require_shape(c.ipi.cost.Q, nx, nx, "cost.q");
  require_shape(c.ipi.cost.R, nu, nu, "cost.r");
  require_shape(c.ipi.initial_gain, nu, nx, "ipi.initial_gain");
  validate(c.ipi);
  validate(c.identifier);
  validate(c.online);
  validate(c.data);
  if (c.ime_window < 1) fail(ErrorCode::kConfiguration, "ipi.ime_window must be >= 1");
  if (c.sim.horizon < 1) fail(ErrorCode::kConfiguration, "sim.horizon must be >= 1");
  require_size(c.sim.x0, nx, "sim.x0");
  if (!(c.sim.dt > 0.0)) fail(ErrorCode::kConfiguration, "sim.dt must be positive");
  if (!(c.sim.blowup_radius > 0.0))
    fail(ErrorCode::kConfiguration, "sim.blowup_radius must be positive");
  if (!(c.stability.delta > 0.0))
    fail(ErrorCode::kConfiguration, "stability.delta must be positive");
  if (!(c.stability.growth_factor >= 1.0))
    fail(ErrorCode::kConfiguration, "stability.growth_factor must be >= 1");
  if (!(c.stability.final_radius > 0.0))
    fail(ErrorCode::kConfiguration, "stability.final_radius must be positive");
  if (c.verify.argmin_states < 1)
    fail(ErrorCode::kConfiguration, "verify.argmin_states must be >= 1");
  if (!(c.verify.argmin_bound > 0.0) || !(c.verify.argmin_step > 0.0) ||
      !(c.verify.argmin_tolerance > 0.0) || !(c.verify.oracle_tolerance > 0.0))
    fail(ErrorCode::kConfiguration, "verify bounds, steps and tolerances must be positive");
  if (c.verify.ime_horizon < 2)
    fail(ErrorCode::kConfiguration, "verify.ime_horizon must be >= 2");
  if (c.plant.input_bound < 0.0)
    fail(ErrorCode::kConfiguration, "plant.input_bound must be >= 0");
}

std::string serialize(const ExperimentConfig& config) {
  std::string out;
  for (const KeySpec& spec : key_table()) {
    out += spec.key;
    out += " = ";
    out += spec.get(config);
    out += '\n';
  }
  return out;
}

std::unique_ptr<Plant> make_plant(const ExperimentConfig& config) {
  if (config.plant.model == "model_a") return std::make_unique<ModelA>();
  if (config.plant.model == "model_b") {
    ModelBOptions options;
    options.disturbance = config.plant.disturbance;
    options.noise_std = config.plant.noise_std;
    options.dt = config.sim.dt;
    return std::make_unique<ModelB>(options);
  }
  if (config.plant.model == "model_a_linear")
    return std::make_unique<LinearPlantModel>(model_a_linear_part());
  fail(ErrorCode::kConfiguration, "unknown plant model '" + config.plant.model + "'");
}

}  // namespace ipi::tools
