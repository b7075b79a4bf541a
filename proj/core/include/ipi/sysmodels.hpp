#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ipi/types.hpp"

namespace ipi {

/// Standard normal draws indexed by step. w(k) is a pure function of
/// (seed, k): a std::seed_seq over the four 32-bit halves of seed and k
/// seeds a std::mt19937_64, and boost::random::normal_distribution (ziggurat)
/// draws one sample. Both pieces are specified bit-for-bit, so replays agree
/// across platforms and regardless of the order steps are queried in.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : seed_(seed) {}

  /// Always returns 0.
  static NoiseSource silent();

  double standard_normal(std::size_t k) const;

  std::uint64_t seed() const { return seed_; }
  bool is_silent() const { return silent_; }

 private:
  std::uint64_t seed_ = 0;
  bool silent_ = false;
};

class Plant {
 public:
  virtual ~Plant() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int input_dim() const = 0;
  virtual StateVec step(const StateVec& x, const ControlVec& u, std::size_t k,
                        const NoiseSource& noise) const = 0;
};

/// x+ = [x2; -2 x1 - 3 x2 + sin x1 + u]
StateVec step_model_a(const StateVec& x, const ControlVec& u);

struct ModelBOptions {
  bool disturbance = true;
  double noise_std = 1.0;  // scales w(k); the reference model uses 1
  double dt = 1.0;
};

/// x+ = [x2; -2 x1 - 0.5 x2 + sin x1 + 0.2 u + u_d(k)],
/// u_d(k) = 0.2 sin(0.1 k dt) + 0.1 w(k).
StateVec step_model_b(const StateVec& x, const ControlVec& u, std::size_t k,
                      const NoiseSource& noise, const ModelBOptions& options = {});

class ModelA final : public Plant {
 public:
  std::string name() const override { return "model_a"; }
  int state_dim() const override { return 2; }
  int input_dim() const override { return 1; }
  StateVec step(const StateVec& x, const ControlVec& u, std::size_t k,
                const NoiseSource& noise) const override;
};

class ModelB final : public Plant {
 public:
  explicit ModelB(ModelBOptions options = {});

  std::string name() const override { return "model_b"; }
  int state_dim() const override { return 2; }
  int input_dim() const override { return 1; }
  StateVec step(const StateVec& x, const ControlVec& u, std::size_t k,
                const NoiseSource& noise) const override;

  const ModelBOptions& options() const { return options_; }

 private:
  ModelBOptions options_;
};

/// x+ = A x + B u.
class LinearPlantModel final : public Plant {
 public:
  LinearPlantModel(Matrix A, Matrix B, std::string name = "linear");

  std::string name() const override { return name_; }
  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int input_dim() const override { return static_cast<int>(B_.cols()); }
  StateVec step(const StateVec& x, const ControlVec& u, std::size_t k,
                const NoiseSource& noise) const override;

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }

 private:
  Matrix A_;
  Matrix B_;
  std::string name_;
};

/// Model A without the sine term.
LinearPlantModel model_a_linear_part();

struct Sinusoid {
  double amplitude = 0.0;
  double frequency = 0.0;  // rad per unit time
  double phase = 0.0;
};

/// Scalar input sum_i a_i sin(w_i k dt + phi_i).
ControlVec excitation_input(std::size_t k, std::span<const Sinusoid> params,
                            double dt = 1.0);

/// Symmetric box clamp; a nonpositive bound means unconstrained.
ControlVec clamp_input(const ControlVec& u, double bound);

struct Episode {
  std::vector<StateVec> states;    // x_0 .. x_L
  std::vector<ControlVec> inputs;  // u_0 .. u_{L-1}
};

struct Dataset {
  std::vector<Episode> episodes;

  std::size_t transition_count() const;
};

/// Open-loop excitation experiments. Unstable plants are sampled in short
/// episodes from small random initial states and cut off once the state
/// leaves `max_radius`, which keeps the data in the region the incremental
/// model describes.
struct ExcitationDataSpec {
  std::size_t episodes = 40;
  std::size_t episode_length = 6;
  double initial_radius = 0.05;
  double max_radius = 0.5;
  std::vector<Sinusoid> excitation{{0.05, 0.7, 0.0}, {0.05, 1.9, 0.0}};
  double dt = 1.0;
};

void validate(const ExcitationDataSpec& spec);

Dataset collect_excitation_data(const Plant& plant,
                                const ExcitationDataSpec& spec,
                                std::uint64_t seed);

}  // namespace ipi
