#include "ipi/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <system_error>

#include "ipi/error.hpp"
#include "ipi/linalg.hpp"

namespace ipi {

double Controller::value_estimate(const StateVec&) const { return 0.0; }

StateFeedback::StateFeedback(Matrix gain) : gain_(std::move(gain)) {
  if (gain_.size() == 0 || !gain_.allFinite())
    fail(ErrorCode::kConfiguration, "feedback gain must be finite and nonempty");
}

ControlVec StateFeedback::act(std::size_t, const StateVec& x) {
  require_size(x, gain_.cols(), "state");
  return gain_ * x;
}

Trajectory rollout(const Plant& plant, Controller& controller,
                   const StateVec& x0, std::size_t horizon, std::uint64_t seed,
                   const RolloutOptions& options) {
  return rollout(plant, controller, x0, horizon, NoiseSource(seed), options);
}

Trajectory rollout(const Plant& plant, Controller& controller,
                   const StateVec& x0, std::size_t horizon,
                   const NoiseSource& noise, const RolloutOptions& options) {
  if (horizon < 1) fail(ErrorCode::kPrecondition, "horizon must be >= 1");
  require_size(x0, plant.state_dim(), "x0");
  if (!x0.allFinite()) fail(ErrorCode::kPrecondition, "x0 must be finite");

  Trajectory traj;
  traj.meta = options.meta;
  traj.meta.seed = noise.seed();
  if (traj.meta.plant.empty()) traj.meta.plant = plant.name();
  traj.records.reserve(horizon + 1);

  StateVec x = x0;
  ControlVec u_prev = ControlVec::Zero(plant.input_dim());
  for (std::size_t k = 0;; ++k) {
    ControlVec u = clamp_input(controller.act(k, x), options.input_bound);
    require_size(u, plant.input_dim(), "controller output");

    TrajectoryRecord rec;
    rec.k = k;
    rec.x = x;
    rec.du = u - u_prev;
    rec.u = u;
    rec.stage_cost = options.cost ? options.cost->stage(x, u) : 0.0;
    rec.value_estimate = controller.value_estimate(x);
    traj.records.push_back(std::move(rec));
    if (k == horizon) break;

    if (!u.allFinite()) {
      traj.diverged = true;
      break;
    }
    StateVec next = plant.step(x, u, k, noise);
    if (!next.allFinite() || next.norm() > options.blowup_radius) {
      traj.diverged = true;
      break;
    }
    x = std::move(next);
    u_prev = std::move(u);
  }
  return traj;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kTrajectoryHeader = "k,x1,x2,u,du,stage_cost,value_est";

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    fail(ErrorCode::kInput, "line " + std::to_string(line) +
                                ": cannot parse number '" + std::string(field) +
                                "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view chomp(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  return s;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << kTrajectoryHeader << '\n';
  for (const TrajectoryRecord& r : trajectory.records) {
    if (r.x.size() != 2 || r.u.size() != 1 || r.du.size() != 1)
      fail(ErrorCode::kPrecondition,
           "trajectory CSV schema covers 2-state, 1-input records only");
    out << r.k << ',' << format_double(r.x(0)) << ',' << format_double(r.x(1))
        << ',' << format_double(r.u(0)) << ',' << format_double(r.du(0)) << ','
        << format_double(r.stage_cost) << ',' << format_double(r.value_estimate)
        << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || chomp(line) != kTrajectoryHeader)
    fail(ErrorCode::kInput,
         std::string("trajectory CSV must start with header ") +
             kTrajectoryHeader);
  Trajectory traj;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = chomp(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (fields.size() != 7)
      fail(ErrorCode::kInput, "line " + std::to_string(lineno) + ": expected 7 fields");
    TrajectoryRecord r;
    const double k = parse_double(fields[0], lineno);
    if (k < 0 || k != std::floor(k))
      fail(ErrorCode::kInput, "line " + std::to_string(lineno) + ": bad step index");
    r.k = static_cast<std::size_t>(k);
    if (!traj.records.empty() && r.k <= traj.records.back().k)
      fail(ErrorCode::kInput, "line " + std::to_string(lineno) +
                                  ": step indices must increase");
    r.x = StateVec(2);
    r.x << parse_double(fields[1], lineno), parse_double(fields[2], lineno);
    r.u = ControlVec::Constant(1, parse_double(fields[3], lineno));
    r.du = ControlVec::Constant(1, parse_double(fields[4], lineno));
    r.stage_cost = parse_double(fields[5], lineno);
    r.value_estimate = parse_double(fields[6], lineno);
    traj.records.push_back(std::move(r));
  }
  if (traj.records.empty())
    fail(ErrorCode::kInput, "trajectory CSV has no data rows");
  return traj;
}

}  // namespace ipi
