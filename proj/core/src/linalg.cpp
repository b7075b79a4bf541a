#include "ipi/linalg.hpp"

#include <algorithm>

#include "ipi/error.hpp"

namespace ipi {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Vector symmetric_eigenvalues(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double spectral_radius(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> solver(a, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix clamp_spectrum(const Matrix& sym, double lo, double hi, bool* clipped) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  Vector w = solver.eigenvalues();
  bool moved = false;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double c = std::clamp(w(i), lo, hi);
    if (c != w(i)) {
      moved = true;
      w(i) = c;
    }
  }
  if (clipped) *clipped = moved;
  if (!moved) return sym;
  const Matrix& v = solver.eigenvectors();
  return symmetrize(v * w.asDiagonal() * v.transpose());
}

bool is_positive_definite(const Matrix& sym) {
  if (sym.rows() != sym.cols() || sym.size() == 0) return false;
  if (!sym.allFinite() || !is_symmetric(sym, 1e-9 * (1.0 + sym.norm())))
    return false;
  Eigen::LLT<Matrix> llt(sym);
  return llt.info() == Eigen::Success;
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    fail(ErrorCode::kConfiguration,
         what + " has shape " + std::to_string(m.rows()) + "x" +
             std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
             "x" + std::to_string(cols));
  }
}

void require_size(const Vector& v, Eigen::Index size, const std::string& what) {
  if (v.size() != size) {
    fail(ErrorCode::kConfiguration,
         what + " has length " + std::to_string(v.size()) + ", expected " +
             std::to_string(size));
  }
}

}  // namespace ipi
