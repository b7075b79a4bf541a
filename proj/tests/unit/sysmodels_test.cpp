#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "generators.hpp"
#include "ipi/cost.hpp"
#include "ipi/linalg.hpp"
#include "ipi/oracle.hpp"
#include "ipi/sysmodels.hpp"
#include "ipi/trajectory.hpp"

namespace ipi {
namespace {

StateVec vec2(double a, double b) { return (StateVec(2) << a, b).finished(); }
ControlVec scalar(double u) { return ControlVec::Constant(1, u); }

TEST(ModelA, EquilibriumAtOrigin) {
  EXPECT_EQ(step_model_a(vec2(0, 0), scalar(0)), vec2(0, 0));
}

TEST(ModelA, HandEvaluatedSteps) {
  const StateVec a = step_model_a(vec2(1, 0), scalar(0));
  EXPECT_DOUBLE_EQ(a(0), 0.0);
  EXPECT_NEAR(a(1), -1.1585290151921035, 1e-15);

  const StateVec b = step_model_a(vec2(0, 1), scalar(2));
  EXPECT_DOUBLE_EQ(b(0), 1.0);
  EXPECT_DOUBLE_EQ(b(1), -1.0);
}

TEST(ModelB, ZeroDisturbanceAtFirstStep) {
  const StateVec x = step_model_b(vec2(0, 0), scalar(0), 0, NoiseSource::silent());
  EXPECT_EQ(x, vec2(0, 0));
}

TEST(ModelB, HandEvaluatedStepWithoutNoise) {
  const StateVec x = step_model_b(vec2(1, 0), scalar(1), 0, NoiseSource::silent());
  EXPECT_DOUBLE_EQ(x(0), 0.0);
  EXPECT_NEAR(x(1), -0.9585290151921035, 1e-15);
}

TEST(ModelB, DisturbanceDisabledKeepsEquilibrium) {
  ModelBOptions opts;
  opts.disturbance = false;
  const ModelB plant(opts);
  const NoiseSource noise(7);
  for (std::size_t k = 0; k < 50; ++k)
    EXPECT_EQ(plant.step(vec2(0, 0), scalar(0), k, noise), vec2(0, 0));
}

TEST(ModelB, SameSeedReplaysStep) {
  const NoiseSource first(42);
  const NoiseSource second(42);
  const StateVec a = step_model_b(vec2(0.3, -0.1), scalar(0.2), 5, first);
  const StateVec b = step_model_b(vec2(0.3, -0.1), scalar(0.2), 5, second);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, step_model_b(vec2(0.3, -0.1), scalar(0.2), 5, NoiseSource(43)));
}

TEST(ModelB, NoiseStdScalesOnlyTheRandomTerm) {
  const NoiseSource noise(3);
  ModelBOptions quiet;
  quiet.noise_std = 0.0;
  const StateVec base = step_model_b(vec2(0.2, 0.1), scalar(0.5), 9, noise, quiet);
  const StateVec full = step_model_b(vec2(0.2, 0.1), scalar(0.5), 9, noise);
  EXPECT_NEAR(full(1) - base(1), 0.1 * noise.standard_normal(9), 1e-15);
  EXPECT_DOUBLE_EQ(full(0), base(0));
}

TEST(NoiseSource, QueryOrderDoesNotMatter) {
  const NoiseSource noise(11);
  std::vector<double> forward;
  for (std::size_t k = 0; k < 100; ++k) forward.push_back(noise.standard_normal(k));
  for (std::size_t k = 100; k-- > 0;) EXPECT_EQ(noise.standard_normal(k), forward[k]);
}

TEST(NoiseSource, SilentIsZero) {
  const NoiseSource silent = NoiseSource::silent();
  EXPECT_TRUE(silent.is_silent());
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(silent.standard_normal(k), 0.0);
}

TEST(NoiseSource, SampleMomentsAreStandard) {
  const NoiseSource noise(2024);
  const std::size_t n = 20000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = noise.standard_normal(k);
    sum += w;
    sq += w * w;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.03);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.05);
}

TEST(Excitation, Examples) {
  const std::vector<Sinusoid> unit{{1.0, 1.0, 0.0}};
  EXPECT_DOUBLE_EQ(excitation_input(0, unit)(0), 0.0);

  const std::vector<Sinusoid> silent{{0.0, 1.3, 0.4}};
  for (std::size_t k : {0u, 3u, 17u, 250u}) EXPECT_EQ(excitation_input(k, silent)(0), 0.0);

  const std::vector<Sinusoid> slow{{1.0, 0.7, 0.0}};
  EXPECT_NEAR(excitation_input(1, slow, 1.0)(0), 0.644217687237691, 1e-15);
}

TEST(Excitation, EmptyParameterListRejected) {
  EXPECT_IPI_ERROR(excitation_input(0, std::vector<Sinusoid>{}), ErrorCode::kConfiguration);
}

TEST(Excitation, ClampRespectsBox) {
  EXPECT_EQ(clamp_input(scalar(3.0), 1.5)(0), 1.5);
  EXPECT_EQ(clamp_input(scalar(-3.0), 1.5)(0), -1.5);
  EXPECT_EQ(clamp_input(scalar(0.4), 1.5)(0), 0.4);
  EXPECT_EQ(clamp_input(scalar(1e9), 0.0)(0), 1e9);
}

TEST(Rollout, ZeroInputAtEquilibriumStaysPut) {
  ModelA plant;
  ZeroInput zero;
  const Trajectory t = rollout(plant, zero, vec2(0, 0), 10, 1);
  ASSERT_EQ(t.size(), 11u);
  EXPECT_FALSE(t.diverged);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t.records[i].k, i);
    EXPECT_EQ(t.records[i].x, vec2(0, 0));
  }
}

TEST(Rollout, InitialPolicyLinearizationIsUnstable) {
  const Matrix closed = (Matrix(2, 2) << 0, 1, -3.5, -4).finished();
  EXPECT_NEAR(spectral_radius(closed), 2.7071067811865475, 1e-12);
}

TEST(Rollout, InitialPolicyDivergesBeforeStep30) {
  ModelA plant;
  StateFeedback initial((Matrix(1, 2) << -2.5, -1.0).finished());
  const Trajectory t = rollout(plant, initial, vec2(0.5, 0), 200, 1);
  EXPECT_TRUE(t.diverged);
  EXPECT_LT(t.size(), 30u);
}

TEST(Rollout, LinearizationOptimalPolicySettlesModelA) {
  const oracle::LinearPlant lin{(Matrix(2, 2) << 0, 1, -1, -3).finished(),
                                (Matrix(2, 1) << 0, 1).finished()};
  const CostSpec cost = make_cost(Matrix::Identity(2, 2), Matrix::Identity(1, 1), 0.7);
  const oracle::RiccatiSolution star = oracle::discounted_riccati(lin, cost);
  ModelA plant;
  StateFeedback policy(-star.K);
  const Trajectory t = rollout(plant, policy, vec2(0.5, 0), 60, 1);
  ASSERT_FALSE(t.diverged);
  // The loop is not normal, so ||x|| may rise for a step; the peak over each
  // 10-step window must still fall.
  double previous = t.records[0].x.norm();
  for (std::size_t w = 0; w + 10 <= 50; w += 10) {
    double peak = 0.0;
    for (std::size_t k = w + 1; k <= w + 10; ++k) peak = std::max(peak, t.records[k].x.norm());
    EXPECT_LT(peak, previous) << "window starting at " << w;
    previous = peak;
  }
  for (std::size_t k = 50; k < t.size(); ++k) EXPECT_LT(t.records[k].x.norm(), 0.05);
}

TEST(Rollout, BlowupStateIsNotRecorded) {
  ModelA plant;
  StateFeedback initial((Matrix(1, 2) << -2.5, -1.0).finished());
  RolloutOptions opts;
  opts.blowup_radius = 10.0;
  const Trajectory t = rollout(plant, initial, vec2(0.5, 0), 100, 1, opts);
  ASSERT_TRUE(t.diverged);
  for (const auto& r : t.records) EXPECT_LE(r.x.norm(), 10.0);
}

TEST(Rollout, InputBoxIsApplied) {
  ModelA plant;
  StateFeedback big((Matrix(1, 2) << -40.0, 0.0).finished());
  RolloutOptions opts;
  opts.input_bound = 0.25;
  const Trajectory t = rollout(plant, big, vec2(0.5, 0), 20, 1, opts);
  for (const auto& r : t.records) EXPECT_LE(std::abs(r.u(0)), 0.25);
}

TEST(RolloutProperty, ReplaysAreBitIdentical) {
  testing::Gen gen(101);
  const ModelB plant;
  for (int c = 0; c < 25; ++c) {
    const StateVec x0 = gen.vector(2, -0.5, 0.5);
    const Matrix gain = gen.matrix(1, 2, -1.0, 1.0);
    const std::uint64_t seed = gen.seed();
    StateFeedback a(gain), b(gain);
    const Trajectory ta = rollout(plant, a, x0, 80, seed);
    const Trajectory tb = rollout(plant, b, x0, 80, seed);
    std::ostringstream ca, cb;
    write_trajectory_csv(ca, ta);
    write_trajectory_csv(cb, tb);
    EXPECT_EQ(ca.str(), cb.str());
  }
}

TEST(RolloutProperty, RecordCountAndIndices) {
  testing::Gen gen(102);
  ModelA plant;
  for (int c = 0; c < testing::kPropertyCases; ++c) {
    const StateVec x0 = gen.vector(2, -2.0, 2.0);
    StateFeedback policy(gen.matrix(1, 2, -4.0, 4.0));
    const auto horizon = static_cast<std::size_t>(gen.integer(1, 60));
    const Trajectory t = rollout(plant, policy, x0, horizon, 5);
    if (!t.diverged) EXPECT_EQ(t.size(), horizon + 1);
    else EXPECT_LE(t.size(), horizon + 1);
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_EQ(t.records[i].k, i);
      EXPECT_TRUE(t.records[i].x.allFinite());
      EXPECT_TRUE(t.records[i].u.allFinite());
    }
  }
}

TEST(TrajectoryCsv, RoundTripIsExact) {
  ModelB plant;
  StateFeedback policy((Matrix(1, 2) << -0.3, 0.2).finished());
  RolloutOptions opts;
  opts.cost = make_cost(Matrix::Identity(2, 2), Matrix::Identity(1, 1), 0.7);
  const Trajectory t = rollout(plant, policy, vec2(0.4, -0.2), 40, 9, opts);
  std::ostringstream out;
  write_trajectory_csv(out, t);
  std::istringstream in(out.str());
  const Trajectory back = read_trajectory_csv(in);
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(back.records[i].x, t.records[i].x);
    EXPECT_EQ(back.records[i].u, t.records[i].u);
    EXPECT_EQ(back.records[i].stage_cost, t.records[i].stage_cost);
  }
  std::ostringstream again;
  write_trajectory_csv(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(TrajectoryCsv, HeaderOnlyAndWrongSchemaRejected) {
  std::istringstream header_only("k,x1,x2,u,du,stage_cost,value_est\n");
  EXPECT_IPI_ERROR(read_trajectory_csv(header_only), ErrorCode::kInput);
  std::istringstream wrong("k,x,y\n0,1,2\n");
  EXPECT_IPI_ERROR(read_trajectory_csv(wrong), ErrorCode::kInput);
  std::istringstream garbage("k,x1,x2,u,du,stage_cost,value_est\n0,1,abc,0,0,0,0\n");
  EXPECT_IPI_ERROR(read_trajectory_csv(garbage), ErrorCode::kInput);
}

TEST(ExcitationData, DeterministicAndInsideRadius) {
  ModelA plant;
  const ExcitationDataSpec spec;
  const Dataset a = collect_excitation_data(plant, spec, 17);
  const Dataset b = collect_excitation_data(plant, spec, 17);
  ASSERT_EQ(a.episodes.size(), b.episodes.size());
  EXPECT_GT(a.transition_count(), 100u);
  for (std::size_t e = 0; e < a.episodes.size(); ++e) {
    ASSERT_EQ(a.episodes[e].states.size(), a.episodes[e].inputs.size() + 1);
    EXPECT_EQ(a.episodes[e].states, b.episodes[e].states);
    // Every state that fed an input lies inside the cutoff radius.
    for (std::size_t k = 0; k < a.episodes[e].inputs.size(); ++k)
      EXPECT_LE(a.episodes[e].states[k].norm(), spec.max_radius);
  }
}

TEST(ExcitationData, InvalidSpecRejected) {
  ExcitationDataSpec spec;
  spec.episodes = 0;
  EXPECT_IPI_ERROR(validate(spec), ErrorCode::kConfiguration);
}

}  // namespace
}  // namespace ipi
