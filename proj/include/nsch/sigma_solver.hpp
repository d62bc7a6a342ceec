#pragma once

#include "nsch/grid.hpp"
#include "nsch/physics.hpp"

namespace nsch {

struct SigmaStepResult {
    ScalarField sigma_next;
    double mean_drift = 0.0;  // |mean(sigma_next) - mean(sigma_prev)|
};

/// One implicit-diffusion step of the nutrient equation:
///   (sigma' - sigma_n)/tau + div(v_n sigma_n) = Lap sigma' - chi Lap phi'
/// The chemotaxis flux uses the already updated phi (Gauss-Seidel ordering);
/// constants inside 1 - phi vanish under the Laplacian.
SigmaStepResult sigma_step(const ScalarField& sigma_n, const ScalarField& phi_next,
                           const VectorField& v_n, const PhysParams& p, double tau);

}  // namespace nsch
