#pragma once

#include <Eigen/Dense>

#include <string>

namespace cpsdiag {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

/// Throws ValidationError naming `what` if `m` is not `rows` x `cols`.
void require_shape(const Eigen::Ref<const Matrix>& m, Index rows, Index cols,
                   const std::string& what);

/// Throws ValidationError naming `what` if `v` does not have `size` entries.
void require_size(const Eigen::Ref<const Vector>& v, Index size, const std::string& what);

/// Symmetric with relative tolerance `tol`.
bool is_symmetric(const Eigen::Ref<const Matrix>& m, double tol = 1e-12);

/// Symmetric and Cholesky-factorizable with a strictly positive spectrum.
bool is_symmetric_positive_definite(const Eigen::Ref<const Matrix>& m);

/// Largest real part over the spectrum of a square matrix.
double spectral_abscissa(const Eigen::Ref<const Matrix>& a);

}  // namespace cpsdiag
