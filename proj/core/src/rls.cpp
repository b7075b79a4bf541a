#include "ipi/rls.hpp"

#include <cmath>
#include <string>

#include "ipi/linalg.hpp"

namespace ipi {

ThetaEstimate::ThetaEstimate(Matrix theta, int state_dim)
    : theta_(std::move(theta)) {
  if (state_dim <= 0 || theta_.cols() != state_dim || theta_.rows() <= state_dim)
    fail(ErrorCode::kConfiguration,
         "theta must be (n_x + n_u) x n_x with n_u >= 1");
  if (!theta_.allFinite())
    fail(ErrorCode::kConfiguration, "theta has non-finite entries");
}

ThetaEstimate ThetaEstimate::zero(int state_dim, int input_dim) {
  return ThetaEstimate(Matrix::Zero(state_dim + input_dim, state_dim), state_dim);
}

ThetaEstimate ThetaEstimate::from_model(const Matrix& A, const Matrix& B) {
  require_shape(A, A.rows(), A.rows(), "A");
  if (B.rows() != A.rows())
    fail(ErrorCode::kConfiguration, "B must have as many rows as A");
  Matrix theta(A.rows() + B.cols(), A.rows());
  theta.topRows(A.rows()) = A.transpose();
  theta.bottomRows(B.cols()) = B.transpose();
  return ThetaEstimate(theta, static_cast<int>(A.rows()));
}

Matrix ThetaEstimate::A_hat() const {
  return theta_.topRows(state_dim()).transpose();
}

Matrix ThetaEstimate::B_hat() const {
  return theta_.bottomRows(input_dim()).transpose();
}

Vector augmented_regressor(const StateVec& dx, const ControlVec& du) {
  Vector X(dx.size() + du.size());
  X << dx, du;
  return X;
}

Vector predict(const ThetaEstimate& theta, const Vector& X) {
  require_size(X, theta.regressor_dim(), "regressor");
  return theta.matrix().transpose() * X;
}

void validate(const RlsConfig& config) {
  if (!(config.forgetting > 0.0 && config.forgetting <= 1.0))
    fail(ErrorCode::kConfiguration, "forgetting factor must lie in (0, 1]");
  if (!(config.initial_cov_scale > 0.0) || !std::isfinite(config.initial_cov_scale))
    fail(ErrorCode::kConfiguration, "initial covariance scale must be positive");
  if (!(config.cov_floor > 0.0 && config.cov_floor < config.cov_ceiling))
    fail(ErrorCode::kConfiguration, "covariance floor/ceiling are inconsistent");
}

IdentifierDegraded::IdentifierDegraded(const std::string& message,
                                       Matrix last_valid)
    : Error(ErrorCode::kIdentifierDegraded, message),
      last_valid_(std::move(last_valid)) {}

RlsStep rls_update(const Matrix& theta, const Matrix& cov, const Vector& X,
                   const Vector& observed, const RlsConfig& config) {
  require_size(X, theta.rows(), "regressor");
  require_size(observed, theta.cols(), "observation");
  require_shape(cov, theta.rows(), theta.rows(), "covariance");

  const double kappa = config.forgetting;
  const Vector lx = cov * X;
  const double den = kappa + X.dot(lx);
  RlsStep step;
  step.innovation = observed - theta.transpose() * X;
  if (!(den > 0.0) || !std::isfinite(den) || !step.innovation.allFinite())
    throw IdentifierDegraded("RLS denominator or innovation is not finite",
                             theta);

  step.theta = theta + (lx / den) * step.innovation.transpose();
  Matrix next = symmetrize((cov - lx * lx.transpose() / den) / kappa);
  if (!step.theta.allFinite() || !next.allFinite())
    throw IdentifierDegraded("RLS update produced non-finite values", theta);
  step.covariance =
      clamp_spectrum(next, config.cov_floor, config.cov_ceiling, &step.clipped);
  return step;
}

RecursiveLeastSquares::RecursiveLeastSquares(Matrix theta0,
                                             const RlsConfig& config)
    : RecursiveLeastSquares(
          theta0,
          config.initial_cov_scale * Matrix::Identity(theta0.rows(), theta0.rows()),
          config) {}

RecursiveLeastSquares::RecursiveLeastSquares(Matrix theta0, Matrix cov0,
                                             const RlsConfig& config)
    : theta_(std::move(theta0)), cov_(std::move(cov0)), config_(config) {
  validate(config_);
  require_shape(cov_, theta_.rows(), theta_.rows(), "initial covariance");
  if (!theta_.allFinite())
    fail(ErrorCode::kConfiguration, "initial estimate has non-finite entries");
  if (!is_positive_definite(cov_))
    fail(ErrorCode::kConfiguration, "initial covariance must be positive definite");
}

Vector RecursiveLeastSquares::predict(const Vector& X) const {
  require_size(X, theta_.rows(), "regressor");
  return theta_.transpose() * X;
}

Vector RecursiveLeastSquares::update(const Vector& X, const Vector& observed) {
  RlsStep step = rls_update(theta_, cov_, X, observed, config_);
  theta_ = std::move(step.theta);
  cov_ = std::move(step.covariance);
  ++steps_;
  if (step.clipped) ++clip_events_;
  return step.innovation;
}

void RecursiveLeastSquares::restore(Matrix theta, Matrix cov, std::size_t steps) {
  require_shape(theta, theta_.rows(), theta_.cols(), "restored estimate");
  require_shape(cov, cov_.rows(), cov_.cols(), "restored covariance");
  if (!theta.allFinite() || !is_positive_definite(symmetrize(cov)))
    fail(ErrorCode::kConfiguration, "restored identifier state is invalid");
  theta_ = std::move(theta);
  cov_ = symmetrize(cov);
  steps_ = steps;
}

Matrix least_squares(std::span<const Vector> regressors,
                     std::span<const Vector> observations, double ridge) {
  if (regressors.size() != observations.size())
    fail(ErrorCode::kConfiguration, "regressor and observation counts differ");
  if (regressors.empty())
    fail(ErrorCode::kInsufficientExcitation, "no samples");
  const auto d = regressors.front().size();
  const auto m = observations.front().size();
  if (static_cast<Eigen::Index>(regressors.size()) < d)
    fail(ErrorCode::kInsufficientExcitation,
         "need at least " + std::to_string(d) + " samples, have " +
             std::to_string(regressors.size()));

  Matrix X(static_cast<Eigen::Index>(regressors.size()), d);
  Matrix Y(static_cast<Eigen::Index>(observations.size()), m);
  for (std::size_t i = 0; i < regressors.size(); ++i) {
    require_size(regressors[i], d, "regressor");
    require_size(observations[i], m, "observation");
    X.row(static_cast<Eigen::Index>(i)) = regressors[i].transpose();
    Y.row(static_cast<Eigen::Index>(i)) = observations[i].transpose();
  }
  if (!X.allFinite() || !Y.allFinite())
    fail(ErrorCode::kInput, "least-squares data has non-finite entries");

  Eigen::JacobiSVD<Matrix> svd(X);
  const Vector& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(d - 1) <= 1e-10 * sv(0))
    fail(ErrorCode::kInsufficientExcitation,
         "regressor matrix is rank deficient (condition number " +
             std::to_string(sv(d - 1) > 0.0 ? sv(0) / sv(d - 1) : INFINITY) +
             ")");

  const Matrix normal =
      X.transpose() * X + ridge * Matrix::Identity(d, d);
  return normal.ldlt().solve(X.transpose() * Y);
}

ThetaEstimate batch_ls(std::span<const Vector> regressors,
                       std::span<const Vector> observations, double ridge) {
  if (observations.empty())
    fail(ErrorCode::kInsufficientExcitation, "no samples");
  const auto nx = static_cast<int>(observations.front().size());
  return ThetaEstimate(least_squares(regressors, observations, ridge), nx);
}

}  // namespace ipi
