#include <benchmark/benchmark.h>

#include "ipi/ipi.hpp"

namespace {

using namespace ipi;

IpiConfig model_a_config() {
  IpiConfig c;
  c.cost = make_cost(Matrix::Identity(2, 2), Matrix::Identity(1, 1), 0.7);
  c.initial_gain = (Matrix(1, 2) << -2.5, -1.0).finished();
  return c;
}

void BM_RlsUpdate(benchmark::State& state) {
  RecursiveLeastSquares rls(Matrix::Zero(3, 2), RlsConfig{0.995, 1e3});
  const Vector X = (Vector(3) << 0.1, -0.2, 0.05).finished();
  const Vector y = (Vector(2) << -0.2, 0.3).finished();
  for (auto _ : state) benchmark::DoNotOptimize(rls.update(X, y));
}
BENCHMARK(BM_RlsUpdate);

void BM_PolicyIncrement(benchmark::State& state) {
  const ThetaEstimate theta = ThetaEstimate::from_model((Matrix(2, 2) << 1, 1, -1, -2).finished(),
                                                        (Matrix(2, 1) << 0, 1).finished());
  const QuadraticKernel P((Matrix(2, 2) << 2.0, 0.5, 0.5, 3.0).finished());
  const CostSpec cost = make_cost(Matrix::Identity(2, 2), Matrix::Identity(1, 1), 0.7);
  const StateVec x = (StateVec(2) << 0.3, -0.1).finished();
  const StateVec dx = (StateVec(2) << 0.02, 0.01).finished();
  const ControlVec u = ControlVec::Constant(1, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(improve_policy_increment(x, dx, u, theta, P, cost));
}
BENCHMARK(BM_PolicyIncrement);

void BM_OfflineTrain(benchmark::State& state) {
  ModelA plant;
  const Dataset data = collect_excitation_data(plant, ExcitationDataSpec{}, 1);
  const IpiConfig config = model_a_config();
  for (auto _ : state) benchmark::DoNotOptimize(offline_train(data, config));
}
BENCHMARK(BM_OfflineTrain)->Unit(benchmark::kMillisecond);

void BM_Rollout(benchmark::State& state) {
  const ModelB plant;
  const StateVec x0 = (StateVec(2) << 0.5, 0.0).finished();
  for (auto _ : state) {
    StateFeedback policy((Matrix(1, 2) << 1.2, 1.5).finished());
    benchmark::DoNotOptimize(rollout(plant, policy, x0, static_cast<std::size_t>(state.range(0)), 1));
  }
}
BENCHMARK(BM_Rollout)->Arg(200)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
