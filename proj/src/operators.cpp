#include "nsch/operators.hpp"

#include <cmath>

namespace nsch {

ScalarField laplacian_neumann(const ScalarField& f) {
    if (!f.finite()) throw ContractError("laplacian_neumann: input not finite");
    const Grid& g = f.grid();
    ScalarField out(g);
    const double ihx2 = 1.0 / (g.hx * g.hx);
    const double ihy2 = 1.0 / (g.hy * g.hy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double c = f(i, j);
            const double fw = (i > 0) ? f(i - 1, j) : c;         // mirror ghost
            const double fe = (i < g.nx - 1) ? f(i + 1, j) : c;
            const double fs = (j > 0) ? f(i, j - 1) : c;
            const double fn = (j < g.ny - 1) ? f(i, j + 1) : c;
            out(i, j) = (fw - 2.0 * c + fe) * ihx2 + (fs - 2.0 * c + fn) * ihy2;
        }
    }
    return out;
}

VectorField gradient_cc(const ScalarField& f) {
    if (!f.finite()) throw ContractError("gradient_cc: input not finite");
    const Grid& g = f.grid();
    VectorField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            out.u(i, j) = (f(i, j) - f(i - 1, j)) / g.hx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.w(i, j) = (f(i, j) - f(i, j - 1)) / g.hy;
    return out;
}

ScalarField divergence_mac(const VectorField& v) {
    if (!v.finite()) throw ContractError("divergence_mac: input not finite");
    const Grid& g = v.grid();
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (v.u(i + 1, j) - v.u(i, j)) / g.hx + (v.w(i, j + 1) - v.w(i, j)) / g.hy;
    return out;
}

ScalarField advect_conservative(const VectorField& v, const ScalarField& f, double div_tol) {
    const Grid& g = f.grid();
    v.require_grid(g, "advect_conservative");
    const double divnorm = l2_norm(divergence_mac(v));
    if (divnorm > div_tol)
        throw ContractError("advect_conservative: velocity not divergence-free, |div v| = " +
                            std::to_string(divnorm));
    // Fluxes on faces; boundary faces carry v = 0 so their flux vanishes.
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double fe = (i < g.nx - 1) ? v.u(i + 1, j) * 0.5 * (f(i, j) + f(i + 1, j)) : 0.0;
            const double fw = (i > 0) ? v.u(i, j) * 0.5 * (f(i - 1, j) + f(i, j)) : 0.0;
            const double fn = (j < g.ny - 1) ? v.w(i, j + 1) * 0.5 * (f(i, j) + f(i, j + 1)) : 0.0;
            const double fs = (j > 0) ? v.w(i, j) * 0.5 * (f(i, j - 1) + f(i, j)) : 0.0;
            out(i, j) = (fe - fw) / g.hx + (fn - fs) / g.hy;
        }
    }
    return out;
}

double grad_norm_sq(const ScalarField& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double d = (f(i, j) - f(i - 1, j)) / g.hx;
            s += d * d;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double d = (f(i, j) - f(i, j - 1)) / g.hy;
            s += d * d;
        }
    return s * g.cell_area();
}

}  // namespace nsch
