#pragma once

#include "cpsdiag/linalg.hpp"
#include "cpsdiag/signal.hpp"

#include <optional>

namespace cpsdiag {

/// Orthogonal-complement projector onto the column space of a full-column-rank matrix.
///
/// Small well-conditioned bases (k <= 3, cond <= 1e6) use the normal-equations
/// form I - M (M^T M)^{-1} M^T; anything else goes through a Householder QR.
class SubspaceProjector {
 public:
  explicit SubspaceProjector(Matrix columns);

  const Matrix& columns() const noexcept { return columns_; }
  bool uses_orthogonal_path() const noexcept { return orthogonal_; }
  double condition_number() const noexcept { return condition_; }

  /// Least-squares coefficients c minimizing ||v - M c||.
  Vector coefficients(const Eigen::Ref<const Vector>& v) const;
  /// v minus its projection onto range(M).
  Vector residual(const Eigen::Ref<const Vector>& v) const;
  /// ||residual(v)||_2, the distance from v to range(M).
  double distance(const Eigen::Ref<const Vector>& v) const;

 private:
  Matrix columns_;
  bool orthogonal_ = false;
  double condition_ = 1.0;
  Matrix left_inverse_;  // (M^T M)^{-1} M^T, normal-equations path only
  Eigen::HouseholderQR<Matrix> qr_;
  Matrix basis_;  // thin orthonormal basis of range(M)
};

/// Continuous-time LTI plant with full state measurement:
///   dx/dt = A x + B u + eta,  y = x,
/// where eta = B alpha under actuator attack and eta = E f under fault.
class PlantModel {
 public:
  PlantModel(Matrix A, Matrix B, Matrix E);

  const Matrix& A() const noexcept { return A_; }
  const Matrix& B() const noexcept { return B_; }
  const Matrix& E() const noexcept { return E_; }

  Index states() const noexcept { return A_.rows(); }
  Index inputs() const noexcept { return B_.cols(); }
  Index fault_channels() const noexcept { return E_.cols(); }

  const SubspaceProjector& attack_space() const noexcept { return attack_space_; }
  const SubspaceProjector& fault_space() const noexcept { return fault_space_; }

 private:
  Matrix A_;
  Matrix B_;
  Matrix E_;
  SubspaceProjector attack_space_;
  SubspaceProjector fault_space_;
};

enum class AnomalyKind { None, Fault, Attack };

const char* to_string(AnomalyKind kind) noexcept;

/// The unknown input of one scenario: at most one of fault or attack, with
/// a declared bound M on ||eta(t)||.
class AnomalySignal {
 public:
  static AnomalySignal none(double eta_bound = 1.0);
  static AnomalySignal fault(Signal f, double eta_bound);
  static AnomalySignal attack(Signal alpha, double eta_bound);

  AnomalyKind kind() const noexcept { return kind_; }
  /// The fault f(t) or attack alpha(t); empty for None.
  const std::optional<Signal>& signal() const noexcept { return signal_; }
  double eta_bound() const noexcept { return eta_bound_; }

  /// Writes eta(t) into `out` (sized plant.states()).
  void eta_into(const PlantModel& plant, double t, Eigen::Ref<Vector> out,
                Eigen::Ref<Vector> scratch) const;

 private:
  AnomalySignal(AnomalyKind kind, std::optional<Signal> signal, double eta_bound);

  AnomalyKind kind_;
  std::optional<Signal> signal_;
  double eta_bound_;
};

/// Checks that the anomaly's channel dimension matches the plant.
void require_compatible(const PlantModel& plant, const AnomalySignal& anomaly);

/// E f(t) under fault, B alpha(t) under attack, 0 otherwise.
Vector eta_of(const PlantModel& plant, const AnomalySignal& anomaly, double t);

/// A x + B u + eta.
Vector plant_derivative(const PlantModel& plant, const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& eta);

/// 2 * sup ||eta(t)|| over the grid {0, dt/2, dt, ..., horizon}; 1.0 when eta is identically zero.
double prescan_eta_bound(const PlantModel& plant, AnomalyKind kind, const std::optional<Signal>& signal,
                         double horizon, double dt);

}  // namespace cpsdiag
