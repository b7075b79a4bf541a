#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ipi/cost.hpp"
#include "ipi/sysmodels.hpp"
#include "ipi/types.hpp"

namespace ipi {

struct TrajectoryRecord {
  std::size_t k = 0;
  StateVec x;
  ControlVec u;
  ControlVec du;
  double stage_cost = 0.0;
  double value_estimate = 0.0;
};

struct TrajectoryMetadata {
  std::uint64_t seed = 0;
  std::string plant;
  std::string config_hash;
};

struct Trajectory {
  TrajectoryMetadata meta;
  std::vector<TrajectoryRecord> records;
  bool diverged = false;

  std::size_t size() const { return records.size(); }
};

class Controller {
 public:
  virtual ~Controller() = default;

  virtual ControlVec act(std::size_t k, const StateVec& x) = 0;
  virtual double value_estimate(const StateVec& x) const;
};

/// u = G x. Note the sign: the reference initial policy is G = [-2.5 -1].
class StateFeedback final : public Controller {
 public:
  explicit StateFeedback(Matrix gain);

  ControlVec act(std::size_t k, const StateVec& x) override;

  const Matrix& gain() const { return gain_; }

 private:
  Matrix gain_;
};

class ZeroInput final : public Controller {
 public:
  explicit ZeroInput(int input_dim = 1) : dim_(input_dim) {}
  ControlVec act(std::size_t, const StateVec&) override {
    return ControlVec::Zero(dim_);
  }

 private:
  int dim_;
};

struct RolloutOptions {
  double blowup_radius = 1e6;
  double input_bound = 0.0;  // <= 0: unconstrained
  std::optional<CostSpec> cost;
  TrajectoryMetadata meta;
};

/// Records (x_k, u_k) for k = 0..horizon; the input at the final record is
/// the one the controller would apply next. Stops early, flagging
/// divergence, when a state is non-finite or exceeds the blow-up radius; the
/// offending state is not recorded.
Trajectory rollout(const Plant& plant, Controller& controller,
                   const StateVec& x0, std::size_t horizon, std::uint64_t seed,
                   const RolloutOptions& options = {});

Trajectory rollout(const Plant& plant, Controller& controller,
                   const StateVec& x0, std::size_t horizon,
                   const NoiseSource& noise, const RolloutOptions& options = {});

/// Shortest round-trip decimal form, '.' separator, locale independent.
std::string format_double(double value);

/// Header k,x1,x2,u,du,stage_cost,value_est; 2-state 1-input only.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

/// Throws an input error on schema mismatch or a header-only file.
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace ipi
