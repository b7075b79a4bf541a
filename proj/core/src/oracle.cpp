#include "ipi/oracle.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "ipi/error.hpp"
#include "ipi/linalg.hpp"

namespace ipi::oracle {

void validate(const LinearPlant& plant) {
  const auto n = plant.A.rows();
  require_shape(plant.A, n, n, "A");
  if (plant.B.rows() != n || plant.B.cols() == 0)
    fail(ErrorCode::kConfiguration, "B must have as many rows as A");
  if (!plant.A.allFinite() || !plant.B.allFinite())
    fail(ErrorCode::kConfiguration, "plant matrices have non-finite entries");
}

namespace {

void check_cost(const LinearPlant& plant, const CostSpec& cost) {
  validate(plant);
  require_shape(cost.Q, plant.A.rows(), plant.A.rows(), "Q");
  require_shape(cost.R, plant.B.cols(), plant.B.cols(), "R");
  if (!(cost.gamma >= 0.0 && cost.gamma < 1.0))
    fail(ErrorCode::kConfiguration, "gamma must lie in [0, 1)");
  if (!is_positive_definite(cost.R))
    fail(ErrorCode::kConfiguration, "R must be positive definite");
  if (symmetric_eigenvalues(symmetrize(cost.Q)).minCoeff() < -kPsdTolerance)
    fail(ErrorCode::kConfiguration, "Q must be positive semidefinite");
}

Matrix optimal_gain(const LinearPlant& plant, const CostSpec& cost,
                    const Matrix& P) {
  const Matrix m = cost.R + cost.gamma * plant.B.transpose() * P * plant.B;
  return m.ldlt().solve(cost.gamma * plant.B.transpose() * P * plant.A);
}

}  // namespace

bool is_stabilizable(const Matrix& A, const Matrix& B, double tol) {
  const auto n = A.rows();
  Eigen::EigenSolver<Matrix> solver(A, false);
  using CMatrix = Eigen::MatrixXcd;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> lambda = solver.eigenvalues()(i);
    if (std::abs(lambda) < 1.0) continue;
    CMatrix pbh(n, n + B.cols());
    pbh.leftCols(n) = A.cast<std::complex<double>>() -
                      lambda * CMatrix::Identity(n, n);
    pbh.rightCols(B.cols()) = B.cast<std::complex<double>>();
    Eigen::JacobiSVD<CMatrix> svd(pbh);
    if (svd.singularValues()(n - 1) <= tol * std::max(1.0, svd.singularValues()(0)))
      return false;
  }
  return true;
}

Matrix riccati_map(const LinearPlant& plant, const CostSpec& cost,
                   const Matrix& P) {
  const Matrix& A = plant.A;
  const Matrix& B = plant.B;
  const double g = cost.gamma;
  const Matrix m = cost.R + g * B.transpose() * P * B;
  const Matrix bpa = B.transpose() * P * A;
  return symmetrize(cost.Q + g * A.transpose() * P * A -
                    g * g * bpa.transpose() * m.ldlt().solve(bpa));
}

RiccatiSolution discounted_riccati(const LinearPlant& plant,
                                   const CostSpec& cost,
                                   const FixedPointOptions& options) {
  check_cost(plant, cost);
  const double root = std::sqrt(cost.gamma);
  if (!is_stabilizable(root * plant.A, root * plant.B))
    fail(ErrorCode::kOracleFailure,
         "(sqrt(gamma) A, sqrt(gamma) B) is not stabilizable");

  Matrix P = symmetrize(cost.Q);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    Matrix next = riccati_map(plant, cost, P);
    if (!next.allFinite())
      fail(ErrorCode::kOracleFailure, "Riccati iteration produced non-finite values");
    const double delta = (next - P).norm();
    P = std::move(next);
    if (delta < options.tolerance) {
      return {QuadraticKernel(P, cost.gamma), optimal_gain(plant, cost, P), it};
    }
  }
  fail(ErrorCode::kOracleFailure,
       "Riccati iteration did not converge in " +
           std::to_string(options.max_iterations) + " iterations");
}

QuadraticKernel discounted_lyapunov(const LinearPlant& plant, const Matrix& K,
                                    const CostSpec& cost,
                                    const FixedPointOptions& options) {
  check_cost(plant, cost);
  require_shape(K, plant.B.cols(), plant.A.rows(), "gain K");
  const Matrix closed = plant.A - plant.B * K;
  const double rho = std::sqrt(cost.gamma) * spectral_radius(closed);
  if (rho >= 1.0)
    fail(ErrorCode::kEvaluationDiverges,
         "sqrt(gamma) * spectral radius of A - BK is " + std::to_string(rho));

  const Matrix stage = symmetrize(cost.Q + K.transpose() * cost.R * K);
  Matrix P = stage;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    Matrix next =
        symmetrize(stage + cost.gamma * closed.transpose() * P * closed);
    const double delta = (next - P).norm();
    P = std::move(next);
    if (delta < options.tolerance) return QuadraticKernel(P, cost.gamma);
  }
  fail(ErrorCode::kOracleFailure, "Lyapunov iteration did not converge");
}

double brute_force_argmin(const std::function<double(double)>& objective,
                          double lo, double hi, double step) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi))
    fail(ErrorCode::kPrecondition, "brute_force_argmin needs finite lo <= hi");
  if (!(step > 0.0)) fail(ErrorCode::kPrecondition, "step must be positive");

  // Index-based to avoid accumulating rounding in the grid points.
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  double best_arg = lo;
  double best = objective(lo);
  for (long long i = 1; i <= count; ++i) {
    const double arg = lo + static_cast<double>(i) * step;
    const double v = objective(arg);
    if (v < best) {
      best = v;
      best_arg = arg;
    }
  }
  return best_arg;
}

double truncated_rollout_cost(const LinearPlant& plant, const Matrix& K,
                              const CostSpec& cost, const StateVec& x0,
                              std::size_t horizon) {
  validate(plant);
  require_size(x0, plant.A.rows(), "x0");
  const Matrix closed = plant.A - plant.B * K;
  StateVec x = x0;
  double total = 0.0;
  double weight = 1.0;
  for (std::size_t k = 0; k < horizon; ++k) {
    const ControlVec u = -K * x;
    total += weight * (x.dot(cost.Q * x) + u.dot(cost.R * u));
    weight *= cost.gamma;
    x = closed * x;
  }
  return total;
}

std::size_t truncation_horizon(double gamma, double stage_bound, double tol) {
  if (gamma <= 0.0) return 1;
  std::size_t n = 0;
  double tail = stage_bound / (1.0 - gamma);
  while (tail >= tol) {
    tail *= gamma;
    ++n;
  }
  return n;
}

}  // namespace ipi::oracle
