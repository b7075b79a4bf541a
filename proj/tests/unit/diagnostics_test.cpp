#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "generators.hpp"
#include "ipi/ipi.hpp"
#include "ipi/oracle.hpp"
#include "reference.hpp"

namespace ipi {
namespace {

StateVec vec2(double a, double b) { return (StateVec(2) << a, b).finished(); }

CostSpec unit_cost(double gamma) {
  return make_cost(Matrix::Identity(2, 2), Matrix::Identity(1, 1), gamma);
}

IpiConfig reference_config(double gamma) {
  IpiConfig cfg;
  cfg.cost = unit_cost(gamma);
  cfg.initial_gain = (Matrix(1, 2) << -2.5, -1.0).finished();
  cfg.tolerance = 1e-10;
  return cfg;
}

OfflineResult linear_run(double gamma) {
  const LinearPlantModel plant = model_a_linear_part();
  return offline_train(collect_excitation_data(plant, ExcitationDataSpec{}, 1), reference_config(gamma));
}

TEST(Monotonicity, SingleRecordIsVacuous) {
  TrainingHistory h;
  h.probe_states = ProbeGrid{}.states(2);
  append_record(h, QuadraticKernel(Matrix::Identity(2, 2)), 0.0);
  const MonotonicityReport r = check_monotonicity(h);
  EXPECT_TRUE(r.passed);
}

TEST(Monotonicity, LinearVerificationRunPasses) {
  const MonotonicityReport r = check_monotonicity(linear_run(0.7).history);
  EXPECT_TRUE(r.passed) << "max excess " << r.max_excess;
}

TEST(Monotonicity, ReportsInsertedIncrease) {
  OfflineResult run = linear_run(0.7);
  ASSERT_GE(run.history.records.size(), 4u);
  const double gap = 0.125;
  const std::size_t at = 2;
  const std::size_t probe = 7;
  // Flatten records at-1..at+1, then bump one probe value at `at`.
  run.history.records[at].probe_values = run.history.records[at - 1].probe_values;
  run.history.records[at + 1].probe_values = run.history.records[at].probe_values;
  run.history.records[at].probe_values[probe] += gap;
  const MonotonicityReport r = check_monotonicity(run.history);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.max_increase, gap, 1e-12);
  EXPECT_EQ(r.iteration, at);
  EXPECT_EQ(r.probe_index, probe);
}

TEST(ImeEstimate, ExactLinearModelHasNoResidual) {
  const Matrix A = (Matrix(2, 2) << 0, 1, -2, -3).finished();
  const Matrix B = (Matrix(2, 1) << 0, 1).finished();
  LinearPlantModel plant(A, B);
  StateFeedback policy((Matrix(1, 2) << 1.5, 2.5).finished());
  const Trajectory t = rollout(plant, policy, vec2(0.8, -0.4), 40, 1);
  EXPECT_LE(estimate_ime(t, ThetaEstimate::from_model(A, B), 30), 1e-10);
}

TEST(ImeEstimate, ShrinksWithAmplitudeOnModelA) {
  const Matrix A0 = (Matrix(2, 2) << 0, 1, -1, -3).finished();
  const Matrix B = (Matrix(2, 1) << 0, 1).finished();
  const oracle::RiccatiSolution star = oracle::discounted_riccati({A0, B}, unit_cost(0.7));
  ModelA plant;
  const ThetaEstimate jacobian = ThetaEstimate::from_model(A0, B);
  std::vector<double> eps;
  for (double a : {0.5, 0.25, 0.125}) {
    StateFeedback policy(-star.K);
    const Trajectory t = rollout(plant, policy, vec2(a, 0), 30, 1);
    eps.push_back(estimate_ime(t, jacobian, t.size() - 1));
  }
  EXPECT_GT(eps[0], eps[1]);
  EXPECT_GT(eps[1], eps[2]);
  // The neglected remainder is cubic in the amplitude.
  EXPECT_LT(eps[2], 0.5 * 0.125 * 0.125 * 0.125);
}

TEST(ImeEstimate, WindowTooLongRejected) {
  ModelA plant;
  ZeroInput zero;
  const Trajectory t = rollout(plant, zero, vec2(0.01, 0), 5, 1);
  EXPECT_IPI_ERROR(estimate_ime(t, ThetaEstimate::zero(2, 1), 6), ErrorCode::kPrecondition);
  EXPECT_IPI_ERROR(estimate_ime(t, ThetaEstimate::zero(2, 1), 0), ErrorCode::kPrecondition);
}

TEST(NearOptimality, IdenticalKernelsHaveZeroGap) {
  const QuadraticKernel p((Matrix(2, 2) << 4, 1, 1, 3).finished());
  const std::vector<StateVec> probe = ProbeGrid{}.states(2);
  const NearOptimalityReport r = near_optimality_gap(p, p, probe, unit_cost(0.7), 0.01, 2.0);
  EXPECT_EQ(r.gap, 0.0);
  EXPECT_GE(r.bound, 0.0);
  EXPECT_NEAR(r.bound, 0.7 * 2.0 * 0.01 / 0.3, 1e-15);
  EXPECT_TRUE(r.within_bound);
}

TEST(NearOptimality, SmallDiscountWithExactModelHasVanishingGap) {
  const Matrix A = (Matrix(2, 2) << 0, 1, -2, -3).finished();
  const Matrix B = (Matrix(2, 1) << 0, 1).finished();
  const LinearPlantModel plant(A, B);
  const IncrementalSamples s = extract_samples(collect_excitation_data(plant, ExcitationDataSpec{}, 2));
  const ThetaEstimate exact = ThetaEstimate::from_model(A, B);
  for (double gamma : {0.1, 0.01, 0.001}) {
    const OfflineResult r = offline_train(s, exact, reference_config(gamma));
    const QuadraticKernel star = oracle::discounted_riccati({A, B}, unit_cost(gamma)).P;
    StateFeedback probe_policy((Matrix(1, 2) << 1.5, 2.5).finished());
    const double eps = estimate_ime(rollout(plant, probe_policy, vec2(1, 1), 30, 1), exact, 30);
    const std::vector<StateVec> probe = ProbeGrid{}.states(2);
    const NearOptimalityReport rep =
        near_optimality_gap(r.kernel, star, probe, unit_cost(gamma), eps, unit_cost(gamma).state_lipschitz(std::sqrt(2.0)));
    EXPECT_LE(rep.bound, 1e-8) << "gamma " << gamma;
    EXPECT_LE(rep.gap, 1e-8) << "gamma " << gamma;
  }
}

TEST(NearOptimality, LinearVerificationGapWithinBound) {
  const double gamma = 0.7;
  const OfflineResult run = linear_run(gamma);
  const LinearPlantModel plant = model_a_linear_part();
  const CostSpec cost = unit_cost(gamma);
  const ProbeGrid grid;
  const std::vector<StateVec> probe = grid.states(2);
  IncrementalPolicy policy(run.theta, project_psd(run.kernel), cost);
  double eps = 0.0;
  for (const StateVec& x0 : probe) {
    policy.reset();
    const Trajectory t = rollout(plant, policy, x0, 30, 1);
    eps = std::max(eps, estimate_ime(t, run.theta, t.size() - 1));
  }
  const QuadraticKernel star = oracle::discounted_riccati({plant.A(), plant.B()}, cost).P;
  const NearOptimalityReport rep =
      near_optimality_gap(run.kernel, star, probe, cost, eps, cost.state_lipschitz(grid.radius(2)));
  EXPECT_TRUE(rep.within_bound) << "gap " << rep.gap << " bound " << rep.bound;
}

TEST(Settling, DivergedTrajectoryFails) {
  ModelA plant;
  StateFeedback initial((Matrix(1, 2) << -2.5, -1.0).finished());
  const Trajectory t = rollout(plant, initial, vec2(0.5, 0), 100, 1);
  const SettleReport r = analyze_settling(t, StabilityIndicator{0.3}, 10, 5.0);
  EXPECT_TRUE(r.diverged);
  EXPECT_FALSE(r.passed);
}

TEST(Settling, CountsViolationsAfterSettleStep) {
  Trajectory t;
  const std::vector<double> norms{1.0, 2.0, 0.5, 0.2, 0.4, 0.1, 0.1};
  for (std::size_t k = 0; k < norms.size(); ++k) {
    TrajectoryRecord r;
    r.k = k;
    r.x = vec2(norms[k], 0.0);
    r.u = ControlVec::Zero(1);
    r.du = ControlVec::Zero(1);
    t.records.push_back(r);
  }
  const SettleReport r = analyze_settling(t, StabilityIndicator{0.3}, 3, 5.0);
  EXPECT_EQ(r.violations_after, 1u);
  ASSERT_TRUE(r.entry_step.has_value());
  EXPECT_EQ(*r.entry_step, 5u);
  EXPECT_TRUE(r.bounded);
  EXPECT_DOUBLE_EQ(r.max_sigma, 2.0);
  EXPECT_FALSE(r.passed);
}

IterationBoundParams documented(double gamma, double q = 0.0) {
  IterationBoundParams p;
  p.alpha_v.discount_exponent = q;
  p.gamma = gamma;
  return p;
}

TEST(IterationBound, MatchesIndependentFormula) {
  for (double q : {0.0, 1.0}) {
    for (double g = 0.41; g < 0.995; g += 0.01) {
      const IterationBound b = min_iterations_bound(documented(g, q));
      const testing::ReferenceBound ref = testing::reference_iteration_bound(g, 0.4, 0.3, 1.0, q);
      EXPECT_EQ(b.iterations, ref.iterations) << "gamma " << g << " q " << q;
      EXPECT_NEAR(b.raw, ref.raw, 1e-9 * std::abs(ref.raw)) << "gamma " << g;
      EXPECT_NEAR(b.ratio, ref.ratio, 1e-12 * ref.ratio);
    }
  }
}

TEST(IterationBound, DocumentedInstantiationValues) {
  // Evaluated outside this code base.
  const std::vector<std::pair<double, long long>> expected{
      {0.5, 12}, {0.6, 13}, {0.7, 16}, {0.8, 22}, {0.9, 36}};
  for (const auto& [g, n] : expected) EXPECT_EQ(min_iterations_bound(documented(g)).iterations, n);
  EXPECT_NEAR(min_iterations_bound(documented(0.7)).raw, 15.750017261958178, 1e-10);
  EXPECT_TRUE(min_iterations_bound(documented(0.7)).hypothesis_holds);
}

TEST(IterationBound, NondecreasingOnGammaGrid) {
  long long last = -1;
  for (double g : {0.5, 0.6, 0.7, 0.8, 0.9}) {
    const long long n = min_iterations_bound(documented(g)).iterations;
    EXPECT_GE(n, last) << "gamma " << g;
    last = n;
  }
}

TEST(IterationBound, UnitLogArgumentNeedsNoIterations) {
  // The ratio scales as 1 / Delta^2 for these laws.
  IterationBoundParams p = documented(0.7);
  const double r1 = min_iterations_bound(p).ratio;
  p.perturbation = std::sqrt(r1);
  const IterationBound b = min_iterations_bound(p);
  EXPECT_NEAR(b.ratio, 1.0, 1e-12);
  EXPECT_EQ(b.iterations, 0);
  p.perturbation *= 0.5;
  EXPECT_EQ(min_iterations_bound(p).iterations, 0);
}

TEST(IterationBound, GrowsWithoutBoundAsDiscountApproachesOne) {
  long long last = 0;
  for (double g : {0.9, 0.99, 0.999, 0.9999}) {
    const long long n = min_iterations_bound(documented(g, 1.0)).iterations;
    EXPECT_GT(n, last);
    last = n;
  }
  EXPECT_GT(last, 100000);
}

TEST(IterationBound, RejectsOutOfRangeInputs) {
  EXPECT_IPI_ERROR(min_iterations_bound(documented(0.3)), ErrorCode::kBoundUndefined);
  EXPECT_IPI_ERROR(min_iterations_bound(documented(1.0)), ErrorCode::kBoundUndefined);
  IterationBoundParams p = documented(0.7);
  p.alpha_gamma.coefficient = 0.0;
  EXPECT_IPI_ERROR(min_iterations_bound(p), ErrorCode::kPrecondition);
  p = documented(0.7);
  p.delta = -1.0;
  EXPECT_IPI_ERROR(min_iterations_bound(p), ErrorCode::kPrecondition);
}

TEST(PowerLawProperty, InverseRoundTrips) {
  testing::Gen gen(9);
  for (int c = 0; c < testing::kPropertyCases; ++c) {
    PowerLaw law{gen.uniform(0.1, 5.0), gen.uniform(0.5, 4.0), gen.uniform(0.0, 2.0)};
    const double s = gen.uniform(0.01, 10.0);
    const double g = gen.uniform(0.0, 0.95);
    EXPECT_NEAR(law.inverse(law(s, g), g), s, 1e-10 * s);
  }
}

TEST(IterationBound, UnequalExponentsUseNumericInverse) {
  IterationBoundParams p = documented(0.7);
  p.alpha_w.exponent = 3.0;
  const IterationBound b = min_iterations_bound(p);
  // alpha_Y(s1) = s1^2 + s1^3 / g must equal alpha_Gamma(delta).
  const double g = 0.7;
  const double num_over = b.numerator * (1.0 - 0.4) / (g - 0.4);
  const double s1 = std::sqrt(num_over);
  EXPECT_NEAR(s1 * s1 + s1 * s1 * s1 / g, 0.09, 1e-12);
}

}  // namespace
}  // namespace ipi
