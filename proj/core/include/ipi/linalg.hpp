#pragma once

#include <string>

#include "ipi/types.hpp"

namespace ipi {

Matrix symmetrize(const Matrix& m);

bool is_symmetric(const Matrix& m, double tol = kSymmetryTolerance);

/// Eigenvalues of a symmetric matrix, ascending.
Vector symmetric_eigenvalues(const Matrix& sym);

double spectral_radius(const Matrix& a);

/// Clamps the spectrum of a symmetric matrix into [lo, hi]. Sets *clipped when
/// any eigenvalue moved.
Matrix clamp_spectrum(const Matrix& sym, double lo, double hi,
                      bool* clipped = nullptr);

bool is_positive_definite(const Matrix& sym);

/// Throws a configuration error naming `what` when the shape is off.
void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what);
void require_size(const Vector& v, Eigen::Index size, const std::string& what);

}  // namespace ipi
