#include "nsch/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nsch/elliptic.hpp"
#include "nsch/operators.hpp"
#include "nsch/spectral.hpp"

namespace nsch {

namespace {

// Node arrays are (nx+1) x (ny+1), x fastest. Nodes sit at cell corners;
// the trapezoidal weight is hx*hy*cx*cy with cx, cy = 1/2 on the walls.
struct NodeGrid {
    int nx, ny;
    size_t idx(int i, int j) const { return static_cast<size_t>(j) * (nx + 1) + i; }
    double cx(int i) const { return (i == 0 || i == nx) ? 0.5 : 1.0; }
    double cy(int j) const { return (j == 0 || j == ny) ? 0.5 : 1.0; }
    size_t count() const { return static_cast<size_t>(nx + 1) * (ny + 1); }
};

// du/dy at nodes with odd-reflection ghosts across the y walls.
void node_dudy(const Grid& g, const VectorField& v, std::vector<double>& out) {
    NodeGrid n{g.nx, g.ny};
    out.assign(n.count(), 0.0);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            double d;
            if (j == 0)
                d = 2.0 * v.u(i, 0) / g.hy;
            else if (j == g.ny)
                d = -2.0 * v.u(i, g.ny - 1) / g.hy;
            else
                d = (v.u(i, j) - v.u(i, j - 1)) / g.hy;
            out[n.idx(i, j)] = d;
        }
    }
}

// dw/dx at nodes with odd-reflection ghosts across the x walls.
void node_dwdx(const Grid& g, const VectorField& v, std::vector<double>& out) {
    NodeGrid n{g.nx, g.ny};
    out.assign(n.count(), 0.0);
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            double d;
            if (i == 0)
                d = 2.0 * v.w(0, j) / g.hx;
            else if (i == g.nx)
                d = -2.0 * v.w(g.nx - 1, j) / g.hx;
            else
                d = (v.w(i, j) - v.w(i - 1, j)) / g.hx;
            out[n.idx(i, j)] = d;
        }
    }
}

// Scatter node coefficients q back to faces: the adjoint of node_dudy /
// node_dwdx including ghost factors. Touches interior faces only.
void scatter_nodes_to_u(const Grid& g, const std::vector<double>& q, VectorField& out) {
    NodeGrid n{g.nx, g.ny};
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const double val = q[n.idx(i, j)];
            if (j == 0)
                out.u(i, 0) += 2.0 * val / g.hy;
            else if (j == g.ny)
                out.u(i, g.ny - 1) -= 2.0 * val / g.hy;
            else {
                out.u(i, j) += val / g.hy;
                out.u(i, j - 1) -= val / g.hy;
            }
        }
    }
}

void scatter_nodes_to_w(const Grid& g, const std::vector<double>& q, VectorField& out) {
    NodeGrid n{g.nx, g.ny};
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const double val = q[n.idx(i, j)];
            if (i == 0)
                out.w(0, j) += 2.0 * val / g.hx;
            else if (i == g.nx)
                out.w(g.nx - 1, j) -= 2.0 * val / g.hx;
            else {
                out.w(i, j) += val / g.hx;
                out.w(i - 1, j) -= val / g.hx;
            }
        }
    }
}

// eta at nodes: mean of the adjacent cell values (mirror ghosts at walls).
void node_eta(const Grid& g, const ScalarField& phi, const PhysParams& p,
              std::vector<double>& out) {
    NodeGrid n{g.nx, g.ny};
    out.assign(n.count(), 0.0);
    for (int j = 0; j <= g.ny; ++j) {
        const int js = std::max(j - 1, 0), jn = std::min(j, g.ny - 1);
        for (int i = 0; i <= g.nx; ++i) {
            const int iw = std::max(i - 1, 0), ie = std::min(i, g.nx - 1);
            const double phibar =
                0.25 * (phi(iw, js) + phi(ie, js) + phi(iw, jn) + phi(ie, jn));
            out[n.idx(i, j)] = eta(phibar, p);
        }
    }
}

struct Strains {
    std::vector<double> dudx, dwdy;  // cells
    std::vector<double> dudy, dwdx;  // nodes
};

void compute_strains(const Grid& g, const VectorField& v, Strains& s) {
    s.dudx.assign(static_cast<size_t>(g.nx) * g.ny, 0.0);
    s.dwdy.assign(static_cast<size_t>(g.nx) * g.ny, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const size_t c = static_cast<size_t>(j) * g.nx + i;
            s.dudx[c] = (v.u(i + 1, j) - v.u(i, j)) / g.hx;
            s.dwdy[c] = (v.w(i, j + 1) - v.w(i, j)) / g.hy;
        }
    node_dudy(g, v, s.dudy);
    node_dwdx(g, v, s.dwdx);
}

// Adjoint of the cell strains: out.u(i+1,j) += t, out.u(i,j) -= t for
// t = coeff(i,j)/hx (interior faces only), and the mirrored w version.
void scatter_cells(const Grid& g, const std::vector<double>& cu, const std::vector<double>& cw,
                   VectorField& out) {
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const size_t c = static_cast<size_t>(j) * g.nx + i;
            const double tu = cu[c] / g.hx;
            if (i + 1 < g.nx) out.u(i + 1, j) += tu;
            if (i >= 1) out.u(i, j) -= tu;
            const double tw = cw[c] / g.hy;
            if (j + 1 < g.ny) out.w(i, j + 1) += tw;
            if (j >= 1) out.w(i, j) -= tw;
        }
}

}  // namespace

VectorField apply_vector_laplacian(const VectorField& v) {
    const Grid& g = v.grid();
    Strains s;
    compute_strains(g, v, s);
    NodeGrid n{g.nx, g.ny};
    VectorField out(g);
    scatter_cells(g, s.dudx, s.dwdy, out);
    std::vector<double> qu(n.count()), qw(n.count());
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const size_t k = n.idx(i, j);
            const double c = n.cx(i) * n.cy(j);
            qu[k] = s.dudy[k] * c;
            qw[k] = s.dwdx[k] * c;
        }
    scatter_nodes_to_u(g, qu, out);
    scatter_nodes_to_w(g, qw, out);
    return out;
}

VectorField apply_viscous(const VectorField& v, const ScalarField& phi, const PhysParams& p) {
    const Grid& g = v.grid();
    phi.require_grid(g, "apply_viscous");
    Strains s;
    compute_strains(g, v, s);
    NodeGrid n{g.nx, g.ny};
    std::vector<double> eta_n;
    node_eta(g, phi, p, eta_n);

    const size_t nc = static_cast<size_t>(g.nx) * g.ny;
    std::vector<double> cu(nc), cw(nc);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const size_t c = static_cast<size_t>(j) * g.nx + i;
            const double e2 = 2.0 * eta(phi(i, j), p);
            cu[c] = e2 * s.dudx[c];
            cw[c] = e2 * s.dwdy[c];
        }
    VectorField out(g);
    scatter_cells(g, cu, cw, out);

    std::vector<double> q(n.count());
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const size_t k = n.idx(i, j);
            const double shear = s.dudy[k] + s.dwdx[k];
            q[k] = eta_n[k] * shear * n.cx(i) * n.cy(j);
        }
    scatter_nodes_to_u(g, q, out);
    scatter_nodes_to_w(g, q, out);
    return out;
}

double grad_quadrature(const VectorField& v) {
    const Grid& g = v.grid();
    Strains s;
    compute_strains(g, v, s);
    NodeGrid n{g.nx, g.ny};
    double acc = 0.0;
    for (double d : s.dudx) acc += d * d;
    for (double d : s.dwdy) acc += d * d;
    double accn = 0.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const size_t k = n.idx(i, j);
            accn += (s.dudy[k] * s.dudy[k] + s.dwdx[k] * s.dwdx[k]) * n.cx(i) * n.cy(j);
        }
    return (acc + accn) * g.cell_area();
}

double sym_grad_quadrature(const VectorField& v) {
    const Grid& g = v.grid();
    Strains s;
    compute_strains(g, v, s);
    NodeGrid n{g.nx, g.ny};
    double acc = 0.0;
    for (double d : s.dudx) acc += d * d;
    for (double d : s.dwdy) acc += d * d;
    double accn = 0.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const size_t k = n.idx(i, j);
            const double shear = s.dudy[k] + s.dwdx[k];
            accn += 0.5 * shear * shear * n.cx(i) * n.cy(j);
        }
    return (acc + accn) * g.cell_area();
}

double dissipation_quadrature(const VectorField& v, const ScalarField& phi,
                              const PhysParams& p) {
    const Grid& g = v.grid();
    phi.require_grid(g, "dissipation_quadrature");
    Strains s;
    compute_strains(g, v, s);
    NodeGrid n{g.nx, g.ny};
    std::vector<double> eta_n;
    node_eta(g, phi, p, eta_n);
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const size_t c = static_cast<size_t>(j) * g.nx + i;
            acc += 2.0 * eta(phi(i, j), p) * (s.dudx[c] * s.dudx[c] + s.dwdy[c] * s.dwdy[c]);
        }
    double accn = 0.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const size_t k = n.idx(i, j);
            const double shear = s.dudy[k] + s.dwdx[k];
            accn += eta_n[k] * shear * shear * n.cx(i) * n.cy(j);
        }
    return (acc + accn) * g.cell_area();
}

VectorField momentum_advection(const VectorField& v) {
    const Grid& g = v.grid();
    VectorField adv(g);
    // u-faces: d(uu)/dx + d(wu)/dy with centered interpolation; tangential
    // ghosts are odd so face averages across a wall vanish.
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const double u_e = 0.5 * (v.u(i, j) + v.u(i + 1, j));
            const double u_w = 0.5 * (v.u(i - 1, j) + v.u(i, j));
            const double d_uu_dx = (u_e * u_e - u_w * u_w) / g.hx;
            const double w_top = 0.5 * (v.w(i - 1, j + 1) + v.w(i, j + 1));
            const double u_top = (j == g.ny - 1) ? 0.0 : 0.5 * (v.u(i, j) + v.u(i, j + 1));
            const double w_bot = 0.5 * (v.w(i - 1, j) + v.w(i, j));
            const double u_bot = (j == 0) ? 0.0 : 0.5 * (v.u(i, j - 1) + v.u(i, j));
            adv.u(i, j) = d_uu_dx + (w_top * u_top - w_bot * u_bot) / g.hy;
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double w_n = 0.5 * (v.w(i, j) + v.w(i, j + 1));
            const double w_s = 0.5 * (v.w(i, j - 1) + v.w(i, j));
            const double d_ww_dy = (w_n * w_n - w_s * w_s) / g.hy;
            const double u_right = 0.5 * (v.u(i + 1, j - 1) + v.u(i + 1, j));
            const double w_right = (i == g.nx - 1) ? 0.0 : 0.5 * (v.w(i, j) + v.w(i + 1, j));
            const double u_left = 0.5 * (v.u(i, j - 1) + v.u(i, j));
            const double w_left = (i == 0) ? 0.0 : 0.5 * (v.w(i - 1, j) + v.w(i, j));
            adv.w(i, j) = d_ww_dy + (u_right * w_right - u_left * w_left) / g.hx;
        }
    }
    return adv;
}

VectorField leray_project(const VectorField& u) {
    if (!u.finite()) throw ContractError("leray_project: input not finite");
    VectorField v = u;
    v.zero_boundary_faces();
    ScalarField div = divergence_mac(v);
    for (size_t k = 0; k < div.size(); ++k) div.data()[k] = -div.data()[k];
    ScalarField gpot = solve_helmholtz_neumann(0.0, 1.0, div);  // -Lap g = -div v
    VectorField grad = gradient_cc(gpot);
    for (size_t k = 0; k < v.u_data().size(); ++k) v.u_data()[k] -= grad.u_data()[k];
    for (size_t k = 0; k < v.w_data().size(); ++k) v.w_data()[k] -= grad.w_data()[k];
    v.zero_boundary_faces();
    return v;
}

namespace {

// Packing between interior-face DOF vectors and VectorFields.
struct FacePack {
    const Grid& g;
    size_t nu, nw;
    explicit FacePack(const Grid& grid)
        : g(grid),
          nu(static_cast<size_t>(grid.nx - 1) * grid.ny),
          nw(static_cast<size_t>(grid.nx) * (grid.ny - 1)) {}

    void pack(const VectorField& v, std::vector<double>& x) const {
        x.resize(nu + nw);
        size_t k = 0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) x[k++] = v.u(i, j);
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) x[k++] = v.w(i, j);
    }
    void unpack(const std::vector<double>& x, VectorField& v) const {
        size_t k = 0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) v.u(i, j) = x[k++];
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) v.w(i, j) = x[k++];
    }
};

double vdot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// PCG for the momentum system (a I + K) v = rhs on interior faces, with the
// constant-coefficient sine-basis solve (a - eta_bar Lap) as preconditioner.
int momentum_pcg(const Grid& g, double a, const ScalarField& phi, const PhysParams& p,
                 const std::vector<double>& rhs, std::vector<double>& x, double rel_tol,
                 int cap) {
    SpectralWorkspace& sw = SpectralWorkspace::get(g);
    FacePack fp(g);
    const double eta_bar = 0.5 * (p.eta_min() + p.eta_max());
    VectorField vtmp(g), ktmp(g);

    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        fp.unpack(in, vtmp);
        ktmp = apply_viscous(vtmp, phi, p);
        fp.pack(ktmp, out);
        for (size_t k = 0; k < out.size(); ++k) out[k] += a * in[k];
    };
    auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
        out.resize(in.size());
        sw.solve_u_helmholtz(a, eta_bar, in.data(), out.data());
        sw.solve_w_helmholtz(a, eta_bar, in.data() + fp.nu, out.data() + fp.nu);
    };

    x.assign(rhs.size(), 0.0);
    std::vector<double> r = rhs, z, pv, ap;
    const double bnorm = std::sqrt(vdot(rhs, rhs));
    if (bnorm == 0.0) return 0;
    const double tol = rel_tol * bnorm;
    precond(r, z);
    pv = z;
    double rz = vdot(r, z);
    double rnorm = std::sqrt(vdot(r, r));
    int it = 0;
    while (rnorm > tol && it < cap) {
        apply(pv, ap);
        const double denom = vdot(pv, ap);
        if (denom <= 0.0)
            throw SolverError("ns_step: momentum operator lost positivity", rnorm);
        const double alpha = rz / denom;
        for (size_t k = 0; k < x.size(); ++k) {
            x[k] += alpha * pv[k];
            r[k] -= alpha * ap[k];
        }
        rnorm = std::sqrt(vdot(r, r));
        if (rnorm <= tol) break;
        precond(r, z);
        const double rz_new = vdot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (size_t k = 0; k < pv.size(); ++k) pv[k] = z[k] + beta * pv[k];
        ++it;
    }
    if (rnorm > tol) throw SolverError("ns_step: momentum solve did not converge", rnorm);
    return it + 1;
}

}  // namespace

StokesSolution stokes_solve(const VectorField& f) {
    if (!f.finite()) throw ContractError("stokes_solve: input not finite");
    const Grid& g = f.grid();
    SpectralWorkspace& sw = SpectralWorkspace::get(g);
    FacePack fpk(g);

    VectorField fproj = leray_project(f);
    std::vector<double> fvec, uvec(fpk.nu + fpk.nw), gvec, tmp;
    fpk.pack(fproj, fvec);

    auto ainv = [&](const std::vector<double>& in, std::vector<double>& out) {
        out.resize(in.size());
        sw.solve_u_helmholtz(0.0, 1.0, in.data(), out.data());
        sw.solve_w_helmholtz(0.0, 1.0, in.data() + fpk.nu, out.data() + fpk.nu);
    };

    // Schur system (-div o A^{-1} o grad) p = -div(A^{-1} f); the operator is
    // SPD on mean-zero pressures since div = -grad^T. The CG residual equals
    // -div(u) for the current pressure iterate.
    ainv(fvec, uvec);
    VectorField util(g);
    fpk.unpack(uvec, util);
    ScalarField rhs_p = divergence_mac(util);
    for (size_t k = 0; k < rhs_p.size(); ++k) rhs_p.data()[k] = -rhs_p.data()[k];

    auto schur_apply = [&](const ScalarField& pr) {
        VectorField gp = gradient_cc(pr);
        fpk.pack(gp, gvec);
        ainv(gvec, tmp);
        VectorField au(g);
        fpk.unpack(tmp, au);
        ScalarField out = divergence_mac(au);
        for (size_t k = 0; k < out.size(); ++k) out.data()[k] = -out.data()[k];
        return out;
    };

    ScalarField pres(g);
    ScalarField r = rhs_p;
    {
        const double m = cell_mean(r);
        for (size_t k = 0; k < r.size(); ++k) r.data()[k] -= m;
    }
    const double rhsnorm = l2_norm(r);
    const double tol = std::max(1e-14, 1e-12 * rhsnorm);
    if (rhsnorm > 0.0) {
        ScalarField pdir = r, spv(g);
        double rr = cell_dot(r, r);
        const int cap = 10 * (g.nx + g.ny);
        int it = 0;
        double rnorm = std::sqrt(rr);
        while (rnorm > tol && it < cap) {
            spv = schur_apply(pdir);
            const double denom = cell_dot(pdir, spv);
            if (denom <= 0.0) throw SolverError("stokes_solve: Schur lost positivity", rnorm);
            const double alpha = rr / denom;
            for (size_t k = 0; k < pres.size(); ++k) {
                pres.data()[k] += alpha * pdir.data()[k];
                r.data()[k] -= alpha * spv.data()[k];
            }
            const double rr_new = cell_dot(r, r);
            const double beta = rr_new / rr;
            rr = rr_new;
            rnorm = std::sqrt(rr);
            for (size_t k = 0; k < pdir.size(); ++k)
                pdir.data()[k] = r.data()[k] + beta * pdir.data()[k];
            ++it;
        }
        if (rnorm > tol)
            throw SolverError("stokes_solve: pressure iteration did not converge", rnorm);
    }

    StokesSolution sol;
    sol.p = pres;
    const double pmean = cell_mean(sol.p);
    for (size_t k = 0; k < sol.p.size(); ++k) sol.p.data()[k] -= pmean;

    VectorField gp = gradient_cc(sol.p);
    fpk.pack(gp, gvec);
    for (size_t k = 0; k < fvec.size(); ++k) fvec[k] -= gvec[k];
    ainv(fvec, uvec);
    sol.u = VectorField(g);
    fpk.unpack(uvec, sol.u);
    sol.energy_pairing = face_dot(fproj, sol.u);
    return sol;
}

FluidStepResult ns_step(const VectorField& v_n, const ScalarField& phi_next,
                        const ScalarField& mu_next, const ScalarField& sigma_next,
                        const ScalarField& p_n, const PhysParams& p, double tau) {
    if (!(tau > 0.0)) throw ContractError("ns_step: tau must be > 0");
    const Grid& g = v_n.grid();
    phi_next.require_grid(g, "ns_step");
    mu_next.require_grid(g, "ns_step");
    sigma_next.require_grid(g, "ns_step");
    p_n.require_grid(g, "ns_step");
    if (max_abs(phi_next) >= 1.0) throw ContractError("ns_step: |phi| must be < 1");

    FacePack fpk(g);
    const double inv_tau = 1.0 / tau;

    // Explicit right-hand side: old velocity, advection, old pressure
    // gradient, capillary/chemotaxis force on faces.
    VectorField adv = momentum_advection(v_n);
    VectorField gp = gradient_cc(p_n);
    ScalarField q(g);
    for (size_t k = 0; k < q.size(); ++k)
        q.data()[k] = mu_next.data()[k] + p.chi * sigma_next.data()[k];
    VectorField rhs(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double force =
                0.5 * (q(i - 1, j) + q(i, j)) * (phi_next(i, j) - phi_next(i - 1, j)) / g.hx;
            rhs.u(i, j) = inv_tau * v_n.u(i, j) - adv.u(i, j) - gp.u(i, j) + force;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double force =
                0.5 * (q(i, j - 1) + q(i, j)) * (phi_next(i, j) - phi_next(i, j - 1)) / g.hy;
            rhs.w(i, j) = inv_tau * v_n.w(i, j) - adv.w(i, j) - gp.w(i, j) + force;
        }

    std::vector<double> rhsv, vstar;
    fpk.pack(rhs, rhsv);
    FluidStepResult res;
    res.momentum_iters =
        momentum_pcg(g, inv_tau, phi_next, p, rhsv, vstar, 1e-12, 20 * (g.nx + g.ny));

    VectorField v_star(g);
    fpk.unpack(vstar, v_star);

    // Pressure correction: Lap psi = div(v*)/tau, v <- v* - tau grad psi.
    ScalarField div_star = divergence_mac(v_star);
    ScalarField prhs(g);
    for (size_t k = 0; k < prhs.size(); ++k) prhs.data()[k] = -div_star.data()[k] * inv_tau;
    ScalarField psi = solve_helmholtz_neumann(0.0, 1.0, prhs);

    res.v_next = v_star;
    VectorField gpsi = gradient_cc(psi);
    for (size_t k = 0; k < res.v_next.u_data().size(); ++k)
        res.v_next.u_data()[k] -= tau * gpsi.u_data()[k];
    for (size_t k = 0; k < res.v_next.w_data().size(); ++k)
        res.v_next.w_data()[k] -= tau * gpsi.w_data()[k];
    res.v_next.zero_boundary_faces();

    res.p_next = p_n;
    for (size_t k = 0; k < res.p_next.size(); ++k) res.p_next.data()[k] += psi.data()[k];
    const double pmean = cell_mean(res.p_next);
    for (size_t k = 0; k < res.p_next.size(); ++k) res.p_next.data()[k] -= pmean;

    res.div_residual = l2_norm(divergence_mac(res.v_next));
    if (res.div_residual > 1e-10)
        throw StepError("ns_step: projection left divergence above tolerance",
                        res.div_residual);
    return res;
}

}  // namespace nsch
