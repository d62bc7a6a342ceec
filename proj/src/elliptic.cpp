#include "nsch/elliptic.hpp"

#include <cmath>

#include "nsch/spectral.hpp"

namespace nsch {

namespace {

void subtract_mean(ScalarField& f) {
    const double m = cell_mean(f);
    double* p = f.data();
    for (size_t k = 0; k < f.size(); ++k) p[k] -= m;
}

ScalarField apply_helmholtz(double a, double b, const ScalarField& x) {
    ScalarField ax = laplacian_neumann(x);
    double* pax = ax.data();
    const double* px = x.data();
    for (size_t k = 0; k < x.size(); ++k) pax[k] = a * px[k] - b * pax[k];
    return ax;
}

}  // namespace

ScalarField solve_helmholtz_neumann(double a, double b, const ScalarField& f) {
    if (a < 0.0 || b <= 0.0)
        throw ContractError("solve_helmholtz_neumann: need a >= 0 and b > 0");
    if (!f.finite()) throw ContractError("solve_helmholtz_neumann: rhs not finite");
    const Grid& g = f.grid();
    SpectralWorkspace& sw = SpectralWorkspace::get(g);

    ScalarField rhs = f;
    const double fnorm = l2_norm(f);
    if (a == 0.0) {
        const double m = cell_mean(f);
        if (std::abs(m) > 1e-10 * std::max(1.0, fnorm))
            throw IncompatibilityError(
                "solve_helmholtz_neumann: a = 0 requires a mean-free rhs, mean = " +
                std::to_string(m));
        subtract_mean(rhs);
    }
    if (fnorm == 0.0) return ScalarField(g);

    const int cap = 10 * (g.nx + g.ny);
    const double tol = 1e-10 * l2_norm(rhs);

    ScalarField x(g);
    sw.solve_cell_helmholtz(a, b, rhs.data(), x.data());

    // Conjugate-gradient polish with the spectral inverse as preconditioner.
    ScalarField r = apply_helmholtz(a, b, x);
    {
        double* pr = r.data();
        const double* pf = rhs.data();
        for (size_t k = 0; k < r.size(); ++k) pr[k] = pf[k] - pr[k];
    }
    double rnorm = l2_norm(r);
    if (rnorm > tol) {
        ScalarField z(g), p(g), ap(g);
        sw.solve_cell_helmholtz(a, b, r.data(), z.data());
        p = z;
        double rz = cell_dot(r, z);
        int it = 0;
        while (rnorm > tol && it < cap) {
            ap = apply_helmholtz(a, b, p);
            const double denom = cell_dot(p, ap);
            if (denom <= 0.0) break;
            const double alpha = rz / denom;
            double* px = x.data();
            double* pp = p.data();
            double* prr = r.data();
            double* pap = ap.data();
            for (size_t k = 0; k < x.size(); ++k) {
                px[k] += alpha * pp[k];
                prr[k] -= alpha * pap[k];
            }
            rnorm = l2_norm(r);
            if (rnorm <= tol) break;
            sw.solve_cell_helmholtz(a, b, r.data(), z.data());
            const double rz_new = cell_dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            const double* pz = z.data();
            for (size_t k = 0; k < p.size(); ++k) pp[k] = pz[k] + beta * pp[k];
            ++it;
        }
        if (rnorm > tol)
            throw SolverError("solve_helmholtz_neumann: no convergence within cap", rnorm);
    }
    if (a == 0.0) subtract_mean(x);
    return x;
}

NormReport norms(const ScalarField& f) {
    if (!f.finite()) throw ContractError("norms: input not finite");
    NormReport n;
    n.l2 = l2_norm(f);
    n.h1_semi = std::sqrt(grad_norm_sq(f));
    n.mean = cell_mean(f);
    ScalarField u = solve_helmholtz_neumann(1.0, 1.0, f);
    n.h1_dual = std::sqrt(std::max(0.0, cell_dot(f, u)));
    return n;
}

double estimate_poincare_constant(const Grid& g, int iterations) {
    ScalarField v(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            v(i, j) = std::sin(1.0 + 2.7 * i + 1.3 * j);  // fixed dense start
    double mu = 0.0;
    for (int it = 0; it < iterations; ++it) {
        double m = cell_mean(v);
        double* pv = v.data();
        for (size_t k = 0; k < v.size(); ++k) pv[k] -= m;
        const double nv = l2_norm(v);
        if (nv == 0.0) throw SolverError("estimate_poincare_constant: degenerate iterate", 0.0);
        for (size_t k = 0; k < v.size(); ++k) pv[k] /= nv;
        ScalarField w = solve_helmholtz_neumann(0.0, 1.0, v);
        mu = cell_dot(v, w);  // Rayleigh quotient for L^{-1}
        v = w;
    }
    return std::sqrt(mu);
}

}  // namespace nsch
