#include "cpsdiag/filter.hpp"

#include "cpsdiag/errors.hpp"

namespace cpsdiag {

FilterState FilterState::initial(Vector x_hat0) {
  FilterState s;
  const Index n = x_hat0.size();
  s.x_hat = std::move(x_hat0);
  s.eta_hat = Vector::Zero(n);
  s.nu_last = Vector::Zero(n);
  return s;
}

void injection_term_into(const Matrix& L, const Eigen::Ref<const Vector>& e, double eps,
                         Eigen::Ref<Vector> out) {
  const double scale = 1.0 / (e.norm() + eps);
  out.noalias() = L * e;
  out *= scale;
}

Vector injection_term(const Matrix& L, const Eigen::Ref<const Vector>& e, double eps) {
  if (!(eps > 0.0)) throw ValidationError("boundary layer eps must be positive");
  require_shape(L, e.size(), e.size(), "gain L");
  Vector out(e.size());
  injection_term_into(L, e, eps, out);
  return out;
}

FilterDerivative filter_derivative(const PlantModel& plant, const ObserverDesign& design,
                                   const FilterState& state, const Eigen::Ref<const Vector>& u,
                                   const Eigen::Ref<const Vector>& y) {
  const Index n = plant.states();
  require_size(state.x_hat, n, "x_hat");
  require_size(state.eta_hat, n, "eta_hat");
  require_size(u, plant.inputs(), "input u");
  require_size(y, n, "measurement y");
  require_shape(design.L(), n, n, "gain L");

  const Vector nu = injection_term(design.L(), y - state.x_hat, design.eps());
  FilterDerivative d;
  d.dx_hat = plant.A() * state.x_hat + plant.B() * u + nu;
  d.deta_hat = (nu - state.eta_hat) / design.tau();
  if (!d.dx_hat.allFinite() || !d.deta_hat.allFinite()) {
    throw NumericalAbort("non-finite filter derivative", 0.0, 0);
  }
  return d;
}

}  // namespace cpsdiag
