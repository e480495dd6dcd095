#pragma once

#include "cpsdiag/sim.hpp"

#include <span>
#include <string_view>

namespace cpsdiag::reference {

// Two-state benchmark plant: A = diag(-30, -20), B = [3; 2], E = [2; 5],
// filter gain 50 I, tau = 0.1.

PlantModel plant();
Matrix gain();
inline constexpr double kTau = 0.1;
/// Boundary layer used by the bundled runs at dt <= 2e-4 (chatter-free under RK4 with gain 50).
inline constexpr double kEps = 5e-3;
/// Boundary layer for the long literal-formula run at dt = 1e-3.
inline constexpr double kEpsLong = 5e-2;

/// Stand-in commanded input u(t) = 2 + sin(0.5 t).
Signal input();
Vector x0();
Vector x_hat0();
/// Steady-state target of the attack case.
Vector attack_target();

/// Fault magnitude f(t) = 5 (1 - exp(-rate t)).
Signal fault_signal(double rate);

/// Names accepted by make(): case1, case1-fast, case1-long, case2, none.
std::span<const std::string_view> names();

/// Builds one bundled scenario. `dt`/`horizon` override the documented defaults.
Scenario make(std::string_view name);
Scenario make(std::string_view name, double dt, double horizon);

}  // namespace cpsdiag::reference
