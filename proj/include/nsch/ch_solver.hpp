#pragma once

#include <span>
#include <vector>

#include "nsch/grid.hpp"
#include "nsch/physics.hpp"

namespace nsch {

struct CHStepConfig {
    double tau = 1e-3;          // time step, > 0
    double newton_tol = 1e-11;  // nonlinear residual tolerance (weighted L2)
    int newton_max = 50;
    double clip_margin = 1e-12; // barrier margin, in (0, 1e-6)
    double linear_tol = 1e-12;  // relative tolerance of the block solve
    int linear_max = 400;

    void validate() const {
        if (!(tau > 0.0)) throw ContractError("CHStepConfig: tau must be > 0");
        if (!(clip_margin > 0.0 && clip_margin < 1e-6))
            throw ContractError("CHStepConfig: clip_margin must lie in (0, 1e-6)");
    }
};

struct CHStepResult {
    ScalarField phi_next;
    ScalarField mu_next;
    int newton_iters = 0;
    double mass_residual = 0.0;
    // Nonlinear residual after each Newton iterate, for tail diagnostics.
    std::vector<double> newton_residuals;
};

/// One semi-implicit step of the convective Cahn-Hilliard-Oono equation:
///   (phi' - phi_n)/tau + div(v_n phi_n) = Lap mu' - alpha (phi' - c0)
///   mu' = A Psi0'(phi') - A theta0 phi_n - B Lap phi' - chi sigma_n
/// Convex part implicit, concave part and couplings lagged. The (phi, mu)
/// pair is solved as one coupled block system per Newton iterate; iterates
/// stay inside [-1 + clip_margin, 1 - clip_margin] via damped line search.
CHStepResult ch_step(const ScalarField& phi_n, const ScalarField& sigma_n,
                     const VectorField& v_n, const PhysParams& p, const CHStepConfig& cfg);

/// Max over n of |(mean phi_n - c0) - (mean phi_0 - c0) (1+alpha tau)^{-n}|.
/// phi_bar0 is the mean of the state the first history entry stepped from.
double discrete_mass_law(double phi_bar0, std::span<const CHStepResult> history,
                         const PhysParams& p, const CHStepConfig& cfg);

}  // namespace nsch
