#include "cpsdiag/linalg.hpp"

#include "cpsdiag/errors.hpp"

#include <Eigen/Eigenvalues>

namespace cpsdiag {

void require_shape(const Eigen::Ref<const Matrix>& m, Index rows, Index cols,
                   const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ValidationError(what + " must be " + std::to_string(rows) + "x" + std::to_string(cols) +
                          ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_size(const Eigen::Ref<const Vector>& v, Index size, const std::string& what) {
  if (v.size() != size) {
    throw ValidationError(what + " must have " + std::to_string(size) + " entries, got " +
                          std::to_string(v.size()));
  }
}

bool is_symmetric(const Eigen::Ref<const Matrix>& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

bool is_symmetric_positive_definite(const Eigen::Ref<const Matrix>& m) {
  if (m.size() == 0 || !m.allFinite() || !is_symmetric(m)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0;
}

double spectral_abscissa(const Eigen::Ref<const Matrix>& a) {
  Eigen::EigenSolver<Matrix> eig(a, false);
  if (eig.info() != Eigen::Success) {
    throw ValidationError("eigenvalue computation did not converge");
  }
  return eig.eigenvalues().real().maxCoeff();
}

}  // namespace cpsdiag
