#pragma once

#include "nsch/grid.hpp"
#include "nsch/physics.hpp"

namespace nsch {

struct FluidStepResult {
    VectorField v_next;
    ScalarField p_next;
    double div_residual = 0.0;
    int momentum_iters = 0;
};

struct StokesSolution {
    VectorField u;
    ScalarField p;
    double energy_pairing = 0.0;  // (f, u) quadrature = ||grad S^{-1} f||^2
};

/// Helmholtz-Leray projection onto discretely divergence-free fields with
/// no-penetration walls: boundary faces are zeroed, then the gradient part
/// from the pure-Neumann Poisson problem Lap g = div u is removed.
VectorField leray_project(const VectorField& u);

/// Discrete Stokes inverse: -Lap u + grad p = P f, div u = 0, no-slip u,
/// mean-zero p. Pressure-Schur conjugate-gradient iteration with exact
/// sine-basis inner solves.
StokesSolution stokes_solve(const VectorField& f);

/// Incremental pressure-correction Navier-Stokes step with variable
/// viscosity: implicit symmetrized-gradient momentum solve, explicit
/// conservative advection, explicit old pressure gradient, face-interpolated
/// capillary/chemotaxis force (mu + chi sigma) grad(phi), then a
/// pressure-Poisson correction restoring div v = 0.
FluidStepResult ns_step(const VectorField& v_n, const ScalarField& phi_next,
                        const ScalarField& mu_next, const ScalarField& sigma_next,
                        const ScalarField& p_n, const PhysParams& p, double tau);

// Variational quadratures over no-slip fields (trapezoidal node weights).
double grad_quadrature(const VectorField& v);      // sum |grad v|^2 dx
double sym_grad_quadrature(const VectorField& v);  // sum |Dv|^2 dx
double dissipation_quadrature(const VectorField& v, const ScalarField& phi,
                              const PhysParams& p);  // sum 2 eta(phi) |Dv|^2 dx

/// K v with K the variational viscous operator -div(2 eta(phi) D .),
/// restricted to interior faces. (K v, v) equals dissipation_quadrature.
VectorField apply_viscous(const VectorField& v, const ScalarField& phi, const PhysParams& p);

/// A v with A the variational componentwise no-slip Laplacian;
/// (A v, v) equals grad_quadrature.
VectorField apply_vector_laplacian(const VectorField& v);

/// Conservative flux-form momentum advection div(v (x) v) on interior faces.
VectorField momentum_advection(const VectorField& v);

}  // namespace nsch
