#include "cpsdiag/model.hpp"

#include "cpsdiag/errors.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace cpsdiag {
namespace {

constexpr double kRankTolerance = 1e-12;
constexpr double kNormalEquationsMaxCond = 1e6;
constexpr Index kNormalEquationsMaxCols = 3;

}  // namespace

SubspaceProjector::SubspaceProjector(Matrix columns) : columns_(std::move(columns)) {
  if (columns_.rows() < 1 || columns_.cols() < 1) {
    throw ValidationError("distribution matrix must be non-empty");
  }
  if (!columns_.allFinite()) {
    throw ValidationError("distribution matrix has non-finite entries");
  }
  if (columns_.cols() > columns_.rows()) {
    throw ValidationError("distribution matrix loses column rank");
  }
  Eigen::JacobiSVD<Matrix> svd(columns_);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smax > 0.0) || smin <= kRankTolerance * smax) {
    throw ValidationError("distribution matrix loses column rank");
  }
  condition_ = smax / smin;
  orthogonal_ = columns_.cols() > kNormalEquationsMaxCols || condition_ > kNormalEquationsMaxCond;
  if (orthogonal_) {
    qr_.compute(columns_);
    basis_ = qr_.householderQ() * Matrix::Identity(columns_.rows(), columns_.cols());
  } else {
    const Matrix gram = columns_.transpose() * columns_;
    left_inverse_ = gram.ldlt().solve(columns_.transpose());
  }
}

Vector SubspaceProjector::coefficients(const Eigen::Ref<const Vector>& v) const {
  require_size(v, columns_.rows(), "projected vector");
  if (orthogonal_) return qr_.solve(v);
  return left_inverse_ * v;
}

Vector SubspaceProjector::residual(const Eigen::Ref<const Vector>& v) const {
  require_size(v, columns_.rows(), "projected vector");
  if (orthogonal_) return v - basis_ * (basis_.transpose() * v);
  return v - columns_ * (left_inverse_ * v);
}

double SubspaceProjector::distance(const Eigen::Ref<const Vector>& v) const {
  return residual(v).norm();
}

namespace {

Matrix checked_state_matrix(Matrix A) {
  if (A.rows() < 1) throw ValidationError("A must have at least one row");
  require_shape(A, A.rows(), A.rows(), "A");
  if (!A.allFinite()) throw ValidationError("A has non-finite entries");
  return A;
}

Matrix checked_channel(Matrix M, Index states, const char* name) {
  if (M.cols() < 1) throw ValidationError(std::string(name) + " must have at least one column");
  require_shape(M, states, M.cols(), name);
  if (!M.allFinite()) throw ValidationError(std::string(name) + " has non-finite entries");
  return M;
}

SubspaceProjector named_projector(const Matrix& M, const char* name) {
  try {
    return SubspaceProjector(M);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(name) + ": " + e.what());
  }
}

}  // namespace

PlantModel::PlantModel(Matrix A, Matrix B, Matrix E)
    : A_(checked_state_matrix(std::move(A))),
      B_(checked_channel(std::move(B), A_.rows(), "B")),
      E_(checked_channel(std::move(E), A_.rows(), "E")),
      attack_space_(named_projector(B_, "B")),
      fault_space_(named_projector(E_, "E")) {}

const char* to_string(AnomalyKind kind) noexcept {
  switch (kind) {
    case AnomalyKind::None:
      return "none";
    case AnomalyKind::Fault:
      return "fault";
    case AnomalyKind::Attack:
      return "attack";
  }
  return "unknown";
}

AnomalySignal::AnomalySignal(AnomalyKind kind, std::optional<Signal> signal, double eta_bound)
    : kind_(kind), signal_(std::move(signal)), eta_bound_(eta_bound) {
  if (!std::isfinite(eta_bound_) || eta_bound_ <= 0.0) {
    throw ValidationError("eta bound M must be a positive finite scalar");
  }
}

AnomalySignal AnomalySignal::none(double eta_bound) {
  return AnomalySignal(AnomalyKind::None, std::nullopt, eta_bound);
}

AnomalySignal AnomalySignal::fault(Signal f, double eta_bound) {
  return AnomalySignal(AnomalyKind::Fault, std::move(f), eta_bound);
}

AnomalySignal AnomalySignal::attack(Signal alpha, double eta_bound) {
  return AnomalySignal(AnomalyKind::Attack, std::move(alpha), eta_bound);
}

void AnomalySignal::eta_into(const PlantModel& plant, double t, Eigen::Ref<Vector> out,
                             Eigen::Ref<Vector> scratch) const {
  switch (kind_) {
    case AnomalyKind::None:
      out.setZero();
      return;
    case AnomalyKind::Fault:
      signal_->evaluate(t, scratch);
      out.noalias() = plant.E() * scratch;
      return;
    case AnomalyKind::Attack:
      signal_->evaluate(t, scratch);
      out.noalias() = plant.B() * scratch;
      return;
  }
}

void require_compatible(const PlantModel& plant, const AnomalySignal& anomaly) {
  if (anomaly.kind() == AnomalyKind::Fault &&
      anomaly.signal()->dimension() != plant.fault_channels()) {
    throw ValidationError("fault signal dimension must equal the column count of E (" +
                          std::to_string(plant.fault_channels()) + ")");
  }
  if (anomaly.kind() == AnomalyKind::Attack && anomaly.signal()->dimension() != plant.inputs()) {
    throw ValidationError("attack signal dimension must equal the column count of B (" +
                          std::to_string(plant.inputs()) + ")");
  }
}

Vector eta_of(const PlantModel& plant, const AnomalySignal& anomaly, double t) {
  require_compatible(plant, anomaly);
  Vector out(plant.states());
  Vector scratch(anomaly.signal() ? anomaly.signal()->dimension() : 0);
  anomaly.eta_into(plant, t, out, scratch);
  return out;
}

Vector plant_derivative(const PlantModel& plant, const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& eta) {
  require_size(x, plant.states(), "state x");
  require_size(u, plant.inputs(), "input u");
  require_size(eta, plant.states(), "unknown input eta");
  return plant.A() * x + plant.B() * u + eta;
}

double prescan_eta_bound(const PlantModel& plant, AnomalyKind kind,
                         const std::optional<Signal>& signal, double horizon, double dt) {
  if (kind == AnomalyKind::None || !signal) return 1.0;
  if (!(dt > 0.0) || !(horizon >= 0.0)) {
    throw ValidationError("eta bound prescan needs dt > 0 and horizon >= 0");
  }
  const Matrix& channel = kind == AnomalyKind::Fault ? plant.E() : plant.B();
  if (signal->dimension() != channel.cols()) {
    throw ValidationError("anomaly signal dimension does not match its distribution matrix");
  }
  const double half = 0.5 * dt;
  const auto samples = static_cast<std::size_t>(std::ceil(horizon / half));
  Vector value(signal->dimension());
  Vector eta(plant.states());
  double sup = 0.0;
  for (std::size_t k = 0; k <= samples; ++k) {
    const double t = std::min(horizon, static_cast<double>(k) * half);
    signal->evaluate(t, value);
    eta.noalias() = channel * value;
    sup = std::max(sup, eta.norm());
  }
  return sup > 0.0 ? 2.0 * sup : 1.0;
}

}  // namespace cpsdiag
