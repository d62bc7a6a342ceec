#pragma once

#include "nsch/ch_solver.hpp"
#include "nsch/fluid.hpp"
#include "nsch/grid.hpp"
#include "nsch/physics.hpp"
#include "nsch/sigma_solver.hpp"

namespace nsch {

/// Time-stamped phase-space point (v, phi, sigma) with derived (mu, p).
struct State {
    double t = 0.0;
    VectorField v;
    ScalarField phi;
    ScalarField sigma;
    ScalarField mu;
    ScalarField p;
};

/// Per-step energy accounting: total energy E, dissipation D, Oono source,
/// audit residual of the energy inequality, and the Lemma-style functionals.
struct EnergyLedger {
    double t = 0.0;
    double E = 0.0;
    double D = 0.0;
    double source = 0.0;
    double residual = 0.0;
    double E_tilde = 0.0;
    double lambda1 = 0.0;
};

struct StepStats {
    int newton_iters = 0;
    double mass_residual = 0.0;
    double div_residual = 0.0;
    int momentum_iters = 0;
};

/// Checks the State invariants (|phi| < 1 pointwise, finite fields,
/// div v below tolerance); throws ContractError otherwise.
void validate_state(const State& s);

/// One full step phi -> sigma -> v at step size tau (cfg.tau is ignored in
/// favor of the explicit argument). Throws on any substep failure, leaving
/// the input untouched.
State step(const State& s, double tau, const PhysParams& p, const CHStepConfig& cfg,
           StepStats* stats = nullptr);

/// Midpoint-quadrature energy ledger entry for a state; `residual` is left 0
/// and is filled by bel_audit on consecutive entries.
EnergyLedger energy(const State& s, const PhysParams& p);

/// Energy-law audit residual rho = E_next - E_prev + tau D_next - tau source_next.
/// Strongly negative rho is fine (extra dissipation); rho above
/// bel_tolerance(tau, grid) is a failure.
double bel_audit(const EnergyLedger& prev, const EnergyLedger& next, double tau);

/// Frozen audit budget c_audit * tau * (tau + h^2), h = max spacing.
/// c_audit was calibrated once on the reference spinodal run (64^2,
/// tau = 1e-3, chi = 0.5) and is kept fixed.
double bel_tolerance(double tau, const Grid& g);
double bel_tolerance(double tau, double h);

/// The constant C1 in E_tilde, chosen so that E_tilde >= 1 on admissible
/// states: |Omega| (A max(0, -min Psi) + |chi| (m2 |Omega|^(1/2) + 2)) + 1.
double e_tilde_shift(const Grid& g, const PhysParams& p);

}  // namespace nsch
