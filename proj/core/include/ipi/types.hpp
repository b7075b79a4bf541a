#pragma once

#include <Eigen/Dense>

namespace ipi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dimension-generic on purpose; the bundled plants are 2-state, 1-input.
using StateVec = Eigen::VectorXd;
using ControlVec = Eigen::VectorXd;

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-8;

}  // namespace ipi
