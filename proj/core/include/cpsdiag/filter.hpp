#pragma once

#include "cpsdiag/design.hpp"
#include "cpsdiag/model.hpp"

namespace cpsdiag {

/// State of the sliding-mode diagnostic filter
///   dx_hat/dt   = A x_hat + B u + nu,        nu = L (y - x_hat) / (||y - x_hat|| + eps)
///   deta_hat/dt = (nu - eta_hat) / tau
struct FilterState {
  Vector x_hat;
  Vector eta_hat;
  /// Injection term at the most recent state, kept for logging.
  Vector nu_last;

  /// eta_hat and nu start at zero.
  static FilterState initial(Vector x_hat0);
};

/// L e / (||e|| + eps); exactly zero at e = 0.
Vector injection_term(const Matrix& L, const Eigen::Ref<const Vector>& e, double eps);

/// Allocation-free variant of injection_term.
void injection_term_into(const Matrix& L, const Eigen::Ref<const Vector>& e, double eps,
                         Eigen::Ref<Vector> out);

struct FilterDerivative {
  Vector dx_hat;
  Vector deta_hat;
};

/// Right-hand side of the filter ODE. Throws NumericalAbort on non-finite values.
FilterDerivative filter_derivative(const PlantModel& plant, const ObserverDesign& design,
                                   const FilterState& state, const Eigen::Ref<const Vector>& u,
                                   const Eigen::Ref<const Vector>& y);

/// eta_hat: the low-pass filtered equivalent output injection.
inline const Vector& equivalent_injection_estimate(const FilterState& state) {
  return state.eta_hat;
}

}  // namespace cpsdiag
