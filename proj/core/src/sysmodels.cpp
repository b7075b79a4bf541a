#include "ipi/sysmodels.hpp"

#include <cmath>
#include <random>
#include <string>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "ipi/error.hpp"
#include "ipi/linalg.hpp"

namespace ipi {

NoiseSource NoiseSource::silent() {
  NoiseSource n(0);
  n.silent_ = true;
  return n;
}

double NoiseSource::standard_normal(std::size_t k) const {
  if (silent_) return 0.0;
  const auto k64 = static_cast<std::uint64_t>(k);
  std::seed_seq seq{static_cast<std::uint32_t>(seed_),
                    static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(k64),
                    static_cast<std::uint32_t>(k64 >> 32)};
  std::mt19937_64 engine(seq);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  return normal(engine);
}

namespace {

void check_two_state(const StateVec& x, const ControlVec& u) {
  require_size(x, 2, "state");
  require_size(u, 1, "input");
}

}  // namespace

StateVec step_model_a(const StateVec& x, const ControlVec& u) {
  check_two_state(x, u);
  StateVec next(2);
  next << x(1), -2.0 * x(0) - 3.0 * x(1) + std::sin(x(0)) + u(0);
  return next;
}

StateVec step_model_b(const StateVec& x, const ControlVec& u, std::size_t k,
                      const NoiseSource& noise, const ModelBOptions& options) {
  check_two_state(x, u);
  double ud = 0.0;
  if (options.disturbance) {
    const double t = static_cast<double>(k) * options.dt;
    ud = 0.2 * std::sin(0.1 * t) +
         0.1 * options.noise_std * noise.standard_normal(k);
  }
  StateVec next(2);
  next << x(1), -2.0 * x(0) - 0.5 * x(1) + std::sin(x(0)) + 0.2 * u(0) + ud;
  return next;
}

StateVec ModelA::step(const StateVec& x, const ControlVec& u, std::size_t,
                      const NoiseSource&) const {
  return step_model_a(x, u);
}

ModelB::ModelB(ModelBOptions options) : options_(options) {
  if (!(options_.noise_std >= 0.0) || !std::isfinite(options_.noise_std))
    fail(ErrorCode::kConfiguration, "noise_std must be finite and >= 0");
  if (!(options_.dt > 0.0))
    fail(ErrorCode::kConfiguration, "dt must be positive");
}

StateVec ModelB::step(const StateVec& x, const ControlVec& u, std::size_t k,
                      const NoiseSource& noise) const {
  return step_model_b(x, u, k, noise, options_);
}

LinearPlantModel::LinearPlantModel(Matrix A, Matrix B, std::string name)
    : A_(std::move(A)), B_(std::move(B)), name_(std::move(name)) {
  require_shape(A_, A_.rows(), A_.rows(), "A");
  if (B_.rows() != A_.rows())
    fail(ErrorCode::kConfiguration, "B must have as many rows as A");
}

StateVec LinearPlantModel::step(const StateVec& x, const ControlVec& u,
                                std::size_t, const NoiseSource&) const {
  require_size(x, A_.rows(), "state");
  require_size(u, B_.cols(), "input");
  return A_ * x + B_ * u;
}

LinearPlantModel model_a_linear_part() {
  Matrix A(2, 2);
  A << 0.0, 1.0, -2.0, -3.0;
  Matrix B(2, 1);
  B << 0.0, 1.0;
  return LinearPlantModel(A, B, "model_a_linear");
}

ControlVec excitation_input(std::size_t k, std::span<const Sinusoid> params,
                            double dt) {
  if (params.empty())
    fail(ErrorCode::kConfiguration, "excitation needs at least one sinusoid");
  const double t = static_cast<double>(k) * dt;
  double u = 0.0;
  for (const Sinusoid& s : params)
    u += s.amplitude * std::sin(s.frequency * t + s.phase);
  return ControlVec::Constant(1, u);
}

ControlVec clamp_input(const ControlVec& u, double bound) {
  if (!(bound > 0.0)) return u;
  return u.cwiseMax(-bound).cwiseMin(bound);
}

std::size_t Dataset::transition_count() const {
  std::size_t n = 0;
  for (const Episode& e : episodes) n += e.inputs.size();
  return n;
}

void validate(const ExcitationDataSpec& spec) {
  if (spec.episodes == 0)
    fail(ErrorCode::kConfiguration, "data.episodes must be >= 1");
  if (spec.episode_length == 0)
    fail(ErrorCode::kConfiguration, "data.episode_length must be >= 1");
  if (!(spec.initial_radius >= 0.0))
    fail(ErrorCode::kConfiguration, "data.initial_radius must be >= 0");
  if (!(spec.max_radius > spec.initial_radius))
    fail(ErrorCode::kConfiguration,
         "data.max_radius must exceed data.initial_radius");
  if (spec.excitation.empty())
    fail(ErrorCode::kConfiguration, "data.excitation needs at least one sinusoid");
  if (!(spec.dt > 0.0)) fail(ErrorCode::kConfiguration, "dt must be positive");
}

Dataset collect_excitation_data(const Plant& plant,
                                const ExcitationDataSpec& spec,
                                std::uint64_t seed) {
  validate(spec);
  std::mt19937_64 engine(seed);
  boost::random::uniform_real_distribution<double> box(-spec.initial_radius,
                                                       spec.initial_radius);
  const NoiseSource noise(seed);
  const int nx = plant.state_dim();

  Dataset data;
  std::size_t clock = 0;  // excitation phase runs across episodes
  for (std::size_t e = 0; e < spec.episodes; ++e) {
    Episode episode;
    StateVec x(nx);
    for (int i = 0; i < nx; ++i) x(i) = box(engine);
    episode.states.push_back(x);
    for (std::size_t k = 0; k < spec.episode_length; ++k, ++clock) {
      const ControlVec u = excitation_input(clock, spec.excitation, spec.dt);
      StateVec next = plant.step(x, u, clock, noise);
      if (!next.allFinite() || next.norm() > spec.max_radius) break;
      episode.inputs.push_back(u);
      episode.states.push_back(next);
      x = std::move(next);
    }
    if (!episode.inputs.empty()) data.episodes.push_back(std::move(episode));
  }
  return data;
}

}  // namespace ipi
