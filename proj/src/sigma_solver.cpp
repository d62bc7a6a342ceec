#include "nsch/sigma_solver.hpp"

#include <cmath>

#include "nsch/elliptic.hpp"
#include "nsch/operators.hpp"

namespace nsch {

SigmaStepResult sigma_step(const ScalarField& sigma_n, const ScalarField& phi_next,
                           const VectorField& v_n, const PhysParams& p, double tau) {
    if (!(tau > 0.0)) throw ContractError("sigma_step: tau must be > 0");
    const Grid& g = sigma_n.grid();
    phi_next.require_grid(g, "sigma_step");
    v_n.require_grid(g, "sigma_step");

    ScalarField adv = advect_conservative(v_n, sigma_n);
    ScalarField lap_phi = laplacian_neumann(phi_next);

    ScalarField rhs(g);
    const double inv_tau = 1.0 / tau;
    for (size_t k = 0; k < rhs.size(); ++k)
        rhs.data()[k] =
            inv_tau * sigma_n.data()[k] - adv.data()[k] - p.chi * lap_phi.data()[k];

    SigmaStepResult res;
    res.sigma_next = solve_helmholtz_neumann(inv_tau, 1.0, rhs);
    res.mean_drift = std::abs(cell_mean(res.sigma_next) - cell_mean(sigma_n));
    return res;
}

}  // namespace nsch
