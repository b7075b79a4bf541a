#pragma once

#include <cstddef>
#include <functional>

#include "ipi/cost.hpp"
#include "ipi/types.hpp"

/// Verification oracles. Nothing in here may depend on learner state; the
/// library target only links the common layer.
namespace ipi::oracle {

struct LinearPlant {
  Matrix A;
  Matrix B;
};

/// Throws a configuration error on shape mismatch or non-finite entries.
void validate(const LinearPlant& plant);

/// PBH test: rank [A - lambda I, B] = n for every eigenvalue with
/// |lambda| >= 1.
bool is_stabilizable(const Matrix& A, const Matrix& B, double tol = 1e-9);

struct RiccatiSolution {
  QuadraticKernel P;
  Matrix K;  // u = -K x
  std::size_t iterations = 0;
};

struct FixedPointOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 100000;
};

/// P <- Q + gamma A'PA - gamma^2 A'PB (R + gamma B'PB)^-1 B'PA, from P = Q.
RiccatiSolution discounted_riccati(const LinearPlant& plant,
                                   const CostSpec& cost,
                                   const FixedPointOptions& options = {});

/// One application of the Riccati map, exposed for residual checks.
Matrix riccati_map(const LinearPlant& plant, const CostSpec& cost,
                   const Matrix& P);

/// Value of u = -K x: P <- Q + K'RK + gamma (A-BK)' P (A-BK).
QuadraticKernel discounted_lyapunov(const LinearPlant& plant, const Matrix& K,
                                    const CostSpec& cost,
                                    const FixedPointOptions& options = {});

/// Exhaustive scan of [lo, hi] with the given step. Ties go to the smaller
/// argument.
double brute_force_argmin(const std::function<double(double)>& objective,
                          double lo, double hi, double step);

/// sum_{k<horizon} gamma^k (x'Qx + u'Ru) along x+ = (A - BK) x.
double truncated_rollout_cost(const LinearPlant& plant, const Matrix& K,
                              const CostSpec& cost, const StateVec& x0,
                              std::size_t horizon);

/// Smallest N with gamma^N * stage_bound / (1 - gamma) < tol.
std::size_t truncation_horizon(double gamma, double stage_bound, double tol);

}  // namespace ipi::oracle
