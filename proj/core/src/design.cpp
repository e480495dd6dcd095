#include "cpsdiag/design.hpp"

#include "cpsdiag/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace cpsdiag {
namespace {

constexpr double kResidualTolerance = 1e-8;
constexpr double kGainMatchTolerance = 1e-8;

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

Matrix lyapunov_operator(const Matrix& A) {
  const Index n = A.rows();
  const Matrix At = A.transpose();
  Matrix K = Matrix::Zero(n * n, n * n);
  // I kron A^T: block-diagonal copies of A^T.
  for (Index blk = 0; blk < n; ++blk) {
    K.block(blk * n, blk * n, n, n) += At;
  }
  // A^T kron I: block (a, c) is A^T(a, c) * I.
  for (Index a = 0; a < n; ++a) {
    for (Index c = 0; c < n; ++c) {
      K.block(a * n, c * n, n, n).diagonal().array() += At(a, c);
    }
  }
  return K;
}

}  // namespace

Matrix LyapunovCertificate::gain() const { return gamma * P.inverse(); }

Matrix solve_lyapunov(const Matrix& A, const Matrix& Q) {
  if (A.rows() < 1 || A.rows() != A.cols()) throw ValidationError("A must be square");
  if (!A.allFinite()) throw ValidationError("A has non-finite entries");
  require_shape(Q, A.rows(), A.rows(), "Q");
  if (!is_symmetric_positive_definite(Q)) {
    throw ValidationError("Q must be symmetric positive definite");
  }
  if (!(spectral_abscissa(A) < 0.0)) {
    throw DesignInfeasible("unstable A: Lyapunov certificate does not exist");
  }
  const Index n = A.rows();
  const Matrix K = lyapunov_operator(A);
  const Eigen::PartialPivLU<Matrix> lu(K);
  const Vector rhs = -Eigen::Map<const Vector>(Q.data(), n * n);
  Vector vecP = lu.solve(rhs);
  // One step of iterative refinement.
  vecP += lu.solve(rhs - K * vecP);
  Matrix P = Eigen::Map<const Matrix>(vecP.data(), n, n);
  P = 0.5 * (P + P.transpose()).eval();
  if (!is_symmetric_positive_definite(P)) {
    throw DesignInfeasible("Lyapunov solution is not positive definite");
  }
  return P;
}

double default_gamma(const Matrix& P, double eta_bound) { return 1.5 * P.norm() * eta_bound; }

Matrix design_gain(const Matrix& P, double gamma, double eta_bound) {
  if (!is_symmetric_positive_definite(P)) {
    throw ValidationError("P must be symmetric positive definite");
  }
  if (!std::isfinite(eta_bound) || eta_bound <= 0.0) {
    throw ValidationError("eta bound M must be a positive finite scalar");
  }
  const double min_gamma = P.norm() * eta_bound;
  if (!std::isfinite(gamma) || !(gamma > min_gamma)) {
    throw DesignInfeasible("gamma violates the Lyapunov margin: need gamma > ||P||_F * M = " +
                               format_number(min_gamma) + ", got " + format_number(gamma),
                           min_gamma);
  }
  Matrix L = gamma * P.llt().solve(Matrix::Identity(P.rows(), P.cols()));
  return 0.5 * (L + L.transpose());
}

LyapunovCertificate certify(const Matrix& A, const Matrix& Q, double gamma, double eta_bound) {
  LyapunovCertificate cert;
  cert.P = solve_lyapunov(A, Q);
  cert.Q = Q;
  cert.gamma = gamma;
  cert.eta_bound = eta_bound;
  // Validates the margin; the gain itself is rebuilt on demand.
  design_gain(cert.P, gamma, eta_bound);

  const double residual = (A.transpose() * cert.P + cert.P * A + Q).norm();
  if (residual > kResidualTolerance * Q.norm()) {
    throw DesignInfeasible("Lyapunov residual " + format_number(residual) +
                           " exceeds tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cert.P, Eigen::EigenvaluesOnly);
  cert.lambda_min_P = eig.eigenvalues().minCoeff();
  cert.beta_plus = gamma - cert.P.norm() * eta_bound;
  cert.beta = 2.0 * cert.beta_plus / std::sqrt(cert.lambda_min_P);
  if (!(cert.beta > 0.0)) {
    throw DesignInfeasible("convergence rate beta is not positive");
  }
  return cert;
}

GainReport validate_direct_gain(const Matrix& L, const Matrix& A, double eta_bound,
                                const Matrix& Q) {
  GainReport report;
  auto uncertified = [&](std::string why) {
    report.warnings.push_back(std::move(why));
    return report;
  };
  if (L.rows() != L.cols() || L.rows() != A.rows() || L.rows() < 1) {
    return uncertified("gain shape does not match the plant; sliding convergence not certified");
  }
  if (!L.allFinite()) {
    return uncertified("gain has non-finite entries; sliding convergence not certified");
  }
  {
    const Matrix sym = 0.5 * (L + L.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      return uncertified("gain not positive definite; sliding convergence not certified");
    }
  }
  Matrix P;
  try {
    P = solve_lyapunov(A, Q);
  } catch (const Error& e) {
    return uncertified(std::string(e.what()) + "; gain accepted without certificate");
  }
  const Index n = L.rows();
  const double gamma = (L * P).trace() / static_cast<double>(n);
  const Matrix P_inv = P.llt().solve(Matrix::Identity(n, n));
  if (!(gamma > 0.0) || (L - gamma * P_inv).norm() > kGainMatchTolerance * L.norm()) {
    return uncertified(
        "gain is not a scalar multiple of P^-1 for the given Q; gain accepted without "
        "certificate");
  }
  if (!std::isfinite(eta_bound) || eta_bound <= 0.0) {
    return uncertified("eta bound M is not positive; gain accepted without certificate");
  }
  if (!(gamma > P.norm() * eta_bound)) {
    return uncertified("gamma = " + format_number(gamma) + " does not exceed ||P||_F * M = " +
                       format_number(P.norm() * eta_bound) +
                       "; gain accepted without certificate");
  }
  try {
    report.certificate = certify(A, Q, gamma, eta_bound);
  } catch (const Error& e) {
    return uncertified(std::string(e.what()) + "; gain accepted without certificate");
  }
  return report;
}

double estimate_convergence_time(const LyapunovCertificate& cert,
                                 const Eigen::Ref<const Vector>& e0) {
  require_size(e0, cert.P.rows(), "initial error e0");
  if (!(cert.beta > 0.0)) throw ValidationError("certificate has non-positive beta");
  const double V0 = e0.dot(cert.P * e0);
  if (!(V0 > 0.0)) return 0.0;
  return 2.0 * std::sqrt(V0) / cert.beta;
}

double conservative_convergence_time(const LyapunovCertificate& cert,
                                     const Eigen::Ref<const Vector>& e0) {
  require_size(e0, cert.P.rows(), "initial error e0");
  if (!(cert.beta_plus > 0.0)) throw ValidationError("certificate has non-positive beta_plus");
  const double V0 = e0.dot(cert.P * e0);
  if (!(V0 > 0.0)) return 0.0;
  const double lambda_max = Eigen::SelfAdjointEigenSolver<Matrix>(cert.P, Eigen::EigenvaluesOnly)
                                .eigenvalues()
                                .maxCoeff();
  return std::sqrt(V0 * lambda_max) / cert.beta_plus;
}

double default_sliding_tolerance(double eps) { return std::max(1e-3, 5.0 * eps); }

ObserverDesign::ObserverDesign(Matrix L, std::optional<LyapunovCertificate> cert,
                               std::vector<std::string> warnings, double tau, double eps,
                               std::optional<double> sliding_tol)
    : L_(std::move(L)),
      certificate_(std::move(cert)),
      warnings_(std::move(warnings)),
      tau_(tau),
      eps_(eps),
      sliding_tol_(sliding_tol.value_or(default_sliding_tolerance(eps))) {
  if (L_.rows() < 1 || L_.rows() != L_.cols()) throw ValidationError("gain L must be square");
  if (!L_.allFinite()) throw ValidationError("gain L has non-finite entries");
  if (!std::isfinite(tau_) || tau_ <= 0.0) throw ValidationError("tau must be positive");
  if (!std::isfinite(eps_) || eps_ <= 0.0) {
    throw ValidationError("boundary layer eps must be positive");
  }
  if (!std::isfinite(sliding_tol_) || sliding_tol_ <= 0.0) {
    throw ValidationError("sliding tolerance must be positive");
  }
  if (certificate_) {
    const Matrix expected = certificate_->gain();
    if ((L_ - expected).norm() > kGainMatchTolerance * L_.norm()) {
      throw ValidationError("gain L does not match gamma * P^-1 of its certificate");
    }
  }
}

ObserverDesign ObserverDesign::direct(Matrix L, GainReport report, double tau, double eps,
                                      std::optional<double> sliding_tol) {
  return ObserverDesign(std::move(L), std::move(report.certificate), std::move(report.warnings),
                        tau, eps, sliding_tol);
}

ObserverDesign ObserverDesign::certified(LyapunovCertificate cert, double tau, double eps,
                                         std::optional<double> sliding_tol) {
  Matrix L = design_gain(cert.P, cert.gamma, cert.eta_bound);
  return ObserverDesign(std::move(L), std::move(cert), {}, tau, eps, sliding_tol);
}

}  // namespace cpsdiag
