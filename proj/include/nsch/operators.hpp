#pragma once

#include "nsch/grid.hpp"

namespace nsch {

/// Second-order 5-point Laplacian with mirror ghosts (zero normal flux).
/// Cell-sum of the output vanishes to round-off.
ScalarField laplacian_neumann(const ScalarField& f);

/// Centered face gradient of a cell field. Boundary faces are 0, consistent
/// with the mirror-ghost Neumann extension.
VectorField gradient_cc(const ScalarField& f);

/// MAC divergence: face differences into cells, including boundary faces.
ScalarField divergence_mac(const VectorField& v);

/// Conservative advection div(v f) with centered face interpolation of f.
/// Requires v discretely divergence-free to div_tol (default 1e-10, measured
/// in the cell L2 norm) and reports otherwise.
ScalarField advect_conservative(const VectorField& v, const ScalarField& f,
                                double div_tol = 1e-10);

/// H1 seminorm squared from face gradients (mirror ghosts, so boundary faces
/// contribute nothing).
double grad_norm_sq(const ScalarField& f);

}  // namespace nsch
