#pragma once

#include "cpsdiag/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cpsdiag {

/// Evidence that L = gamma P^{-1} drives e = x - x_hat to zero in finite time:
/// A^T P + P A = -Q with P, Q SPD, and gamma > ||P||_F M.
struct LyapunovCertificate {
  Matrix P;
  Matrix Q;
  double gamma = 0.0;
  double eta_bound = 0.0;
  double lambda_min_P = 0.0;
  /// gamma - ||P||_F M.
  double beta_plus = 0.0;
  /// 2 beta_plus / sqrt(lambda_min(P)), the rate in dV/dt <= -beta sqrt(V).
  double beta = 0.0;

  double frobenius_P() const { return P.norm(); }
  double min_gamma() const { return P.norm() * eta_bound; }
  Matrix gain() const;
};

/// Solves A^T P + P A = -Q through the vectorized n^2 x n^2 system
/// (I kron A^T + A^T kron I) vec(P) = -vec(Q).
///
/// Throws DesignInfeasible if A is not Hurwitz, ValidationError if Q is not SPD.
Matrix solve_lyapunov(const Matrix& A, const Matrix& Q);

/// L = gamma P^{-1}. Throws DesignInfeasible carrying ||P||_F M if gamma does not exceed it.
Matrix design_gain(const Matrix& P, double gamma, double eta_bound);

/// 1.5 * ||P||_F * M.
double default_gamma(const Matrix& P, double eta_bound);

/// Builds and checks the full certificate for (A, Q, gamma, M).
LyapunovCertificate certify(const Matrix& A, const Matrix& Q, double gamma, double eta_bound);

/// Outcome of validating a gain that was not produced by design_gain.
struct GainReport {
  std::optional<LyapunovCertificate> certificate;
  std::vector<std::string> warnings;

  bool certified() const noexcept { return certificate.has_value(); }
};

/// Looks for a certificate behind a directly supplied gain: solves P from (A, Q)
/// and accepts L when it is a scalar multiple gamma P^{-1} with an admissible
/// gamma. Never throws; every failure becomes a warning.
GainReport validate_direct_gain(const Matrix& L, const Matrix& A, double eta_bound,
                                const Matrix& Q);

/// T_max = 2 sqrt(e0^T P e0) / beta.
double estimate_convergence_time(const LyapunovCertificate& cert, const Eigen::Ref<const Vector>& e0);

/// 2 sqrt(V0 lambda_max(P)) / (2 beta_plus): the same bound with ||e|| >= sqrt(V / lambda_max(P)),
/// which holds for any conditioning of P. Never smaller than estimate_convergence_time.
double conservative_convergence_time(const LyapunovCertificate& cert,
                                     const Eigen::Ref<const Vector>& e0);

inline constexpr double kDefaultTau = 0.1;
inline constexpr double kDefaultBoundaryLayer = 1e-4;

/// max(1e-3, 5 eps): the residual band that counts as "on the sliding surface".
double default_sliding_tolerance(double eps);

/// Observer gain plus the filter constants it runs with.
class ObserverDesign {
 public:
  /// Gain supplied directly; `report` records whether a certificate was found.
  static ObserverDesign direct(Matrix L, GainReport report, double tau = kDefaultTau,
                               double eps = kDefaultBoundaryLayer,
                               std::optional<double> sliding_tol = std::nullopt);
  /// L = gamma P^{-1} from a certificate.
  static ObserverDesign certified(LyapunovCertificate cert, double tau = kDefaultTau,
                                  double eps = kDefaultBoundaryLayer,
                                  std::optional<double> sliding_tol = std::nullopt);

  const Matrix& L() const noexcept { return L_; }
  const std::optional<LyapunovCertificate>& certificate() const noexcept { return certificate_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  double tau() const noexcept { return tau_; }
  double eps() const noexcept { return eps_; }
  double sliding_tol() const noexcept { return sliding_tol_; }

 private:
  ObserverDesign(Matrix L, std::optional<LyapunovCertificate> cert,
                 std::vector<std::string> warnings, double tau, double eps,
                 std::optional<double> sliding_tol);

  Matrix L_;
  std::optional<LyapunovCertificate> certificate_;
  std::vector<std::string> warnings_;
  double tau_;
  double eps_;
  double sliding_tol_;
};

}  // namespace cpsdiag
