#pragma once

#include "nsch/grid.hpp"
#include "nsch/operators.hpp"

namespace nsch {

/// Solve a*u - b*Lap_N(u) = f on cell values with homogeneous Neumann walls.
/// Preconditioned conjugate-gradient iteration, relative tolerance 1e-10,
/// iteration cap 10*(nx+ny); the preconditioner is the exact cosine-basis
/// inverse, so the loop normally exits after one iteration.
/// For a == 0 the right-hand side must be mean-free (Fredholm condition);
/// the solution mean is fixed to zero.
ScalarField solve_helmholtz_neumann(double a, double b, const ScalarField& f);

/// L2 norm, H1 seminorm, (H1)' dual norm and generalized mean of f.
/// The dual norm is (f,u)^(1/2) with u - Lap u = f.
NormReport norms(const ScalarField& f);

/// Discrete Poincare constant 1/sqrt(lambda_1) from power iteration on the
/// inverse Neumann Laplacian over mean-free fields. Deterministic start
/// vector; estimated once per grid by callers that need it.
double estimate_poincare_constant(const Grid& g, int iterations = 200);

}  // namespace nsch
