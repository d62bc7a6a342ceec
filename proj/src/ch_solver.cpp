#include "nsch/ch_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

#include "nsch/operators.hpp"
#include "nsch/spectral.hpp"

namespace nsch {

namespace {

void laplacian_into(const Grid& g, const double* f, double* out) {
    const double ihx2 = 1.0 / (g.hx * g.hx);
    const double ihy2 = 1.0 / (g.hy * g.hy);
    const int nx = g.nx, ny = g.ny;
    for (int j = 0; j < ny; ++j) {
        const double* row = f + static_cast<size_t>(j) * nx;
        double* orow = out + static_cast<size_t>(j) * nx;
        const double* rows = (j > 0) ? row - nx : row;
        const double* rown = (j < ny - 1) ? row + nx : row;
        for (int i = 0; i < nx; ++i) {
            const double c = row[i];
            const double fw = (i > 0) ? row[i - 1] : c;
            const double fe = (i < nx - 1) ? row[i + 1] : c;
            orow[i] = (fw - 2.0 * c + fe) * ihx2 + (rows[i] - 2.0 * c + rown[i]) * ihy2;
        }
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double nrm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Coupled Newton system for one CH step. Unknowns x = [phi; mu], residual
//   F1 = aC phi - L mu - g1
//   F2 = mu - A Psi0'(phi) + B L phi + g2
// with Jacobian blocks [aC I, -L; -A D + B L, I], D = diag(Psi0''(phi)).
struct BlockSystem {
    const Grid& g;
    SpectralWorkspace& sw;
    double aC, A, B, theta;
    size_t n;
    std::vector<double> d;           // current diag Psi0''(phi)
    double dhat = 1.0;               // preconditioner constant
    double dmax = 1.0;
    mutable std::vector<double> t1, t2, s1, s2;

    BlockSystem(const Grid& grid, double aC_, const PhysParams& p)
        : g(grid),
          sw(SpectralWorkspace::get(grid)),
          aC(aC_),
          A(p.A),
          B(p.B),
          theta(p.theta),
          n(static_cast<size_t>(grid.nx) * grid.ny),
          d(n, 0.0),
          t1(n),
          t2(n),
          s1(n),
          s2(n) {}

    void set_state(const double* phi) {
        double sum = 0.0;
        dmax = 0.0;
        for (size_t k = 0; k < n; ++k) {
            d[k] = theta / ((1.0 - phi[k]) * (1.0 + phi[k]));
            sum += d[k];
            dmax = std::max(dmax, d[k]);
        }
        dhat = sum / static_cast<double>(n);
    }

    // A barrier-hugging iterate makes diag(Psi0'') span many orders of
    // magnitude; no constant-coefficient preconditioner helps there.
    bool stiff() const { return dmax > 1e3 * dhat; }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const double* dphi = x.data();
        const double* dmu = x.data() + n;
        double* y1 = y.data();
        double* y2 = y.data() + n;
        laplacian_into(g, dmu, y1);
        laplacian_into(g, dphi, y2);
        for (size_t k = 0; k < n; ++k) {
            y1[k] = aC * dphi[k] - y1[k];
            y2[k] = -A * d[k] * dphi[k] + B * y2[k] + dmu[k];
        }
    }

    // Exact inverse of the constant-coefficient block (D -> dhat I) in the
    // cosine basis.
    void precondition(const std::vector<double>& r, std::vector<double>& z) const {
        sw.cell_dct_forward(r.data(), t1.data());
        sw.cell_dct_forward(r.data() + n, t2.data());
        const auto& lx = sw.cell_eig_x();
        const auto& ly = sw.cell_eig_y();
        const int nx = g.nx, ny = g.ny;
        for (int ky = 0; ky < ny; ++ky) {
            for (int kx = 0; kx < nx; ++kx) {
                const size_t idx = static_cast<size_t>(ky) * nx + kx;
                const double lam = lx[kx] + ly[ky];
                const double det = aC + lam * (A * dhat + B * lam);
                const double r1 = t1[idx], r2 = t2[idx];
                t1[idx] = (r1 - lam * r2) / det;
                t2[idx] = ((A * dhat + B * lam) * r1 + aC * r2) / det;
            }
        }
        sw.cell_dct_inverse(t1.data(), s1.data());
        sw.cell_dct_inverse(t2.data(), s2.data());
        const double s = 1.0 / sw.cell_norm();
        for (size_t k = 0; k < n; ++k) {
            z[k] = s1[k] * s;
            z[k + n] = s2[k] * s;
        }
    }
};

// Preconditioned BiCGStab; x starts at zero. Returns achieved residual.
double bicgstab(const BlockSystem& sys, const std::vector<double>& b, std::vector<double>& x,
                double rel_tol, int max_iter) {
    const size_t m = b.size();
    x.assign(m, 0.0);
    std::vector<double> r = b, rhat = b, v(m, 0.0), p(m, 0.0), phat(m), shat(m), t(m), s(m);
    const double bnorm = nrm(b);
    if (bnorm == 0.0) return 0.0;
    const double tol = rel_tol * bnorm;
    double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
    double rnorm = nrm(r);
    for (int it = 0; it < max_iter && rnorm > tol; ++it) {
        const double rho = dot(rhat, r);
        if (std::abs(rho) < 1e-300) break;
        if (it == 0) {
            p = r;
        } else {
            const double beta = (rho / rho_prev) * (alpha / omega);
            for (size_t k = 0; k < m; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        sys.precondition(p, phat);
        sys.apply(phat, v);
        const double rv = dot(rhat, v);
        if (std::abs(rv) < 1e-300) break;
        alpha = rho / rv;
        for (size_t k = 0; k < m; ++k) s[k] = r[k] - alpha * v[k];
        if (nrm(s) <= tol) {
            for (size_t k = 0; k < m; ++k) x[k] += alpha * phat[k];
            return nrm(s);
        }
        sys.precondition(s, shat);
        sys.apply(shat, t);
        const double tt = dot(t, t);
        if (tt < 1e-300) break;
        omega = dot(t, s) / tt;
        for (size_t k = 0; k < m; ++k) {
            x[k] += alpha * phat[k] + omega * shat[k];
            r[k] = s[k] - omega * t[k];
        }
        rho_prev = rho;
        rnorm = nrm(r);
    }
    if (rnorm > tol) throw SolverError("ch_step: block linear solve stalled", rnorm);
    return rnorm;
}

// Assembled sparse LU of the block Jacobian; the robust path for stiff
// barrier-hugging states.
void direct_solve(const BlockSystem& sys, const std::vector<double>& b,
                  std::vector<double>& x) {
    const Grid& g = sys.g;
    const int nx = g.nx, ny = g.ny, n = nx * ny;
    const double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(12) * n);
    auto id = [&](int i, int j) { return j * nx + i; };
    // L rows: scale * (mirror-ghost Laplacian) into (row_off, col_off) block
    auto add_laplacian = [&](int row_off, int col_off, double scale) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const int c = id(i, j);
                double diag = 0.0;
                auto nb = [&](int ii, int jj, double w) {
                    trip.emplace_back(row_off + c, col_off + id(ii, jj), scale * w);
                    diag -= w;
                };
                if (i > 0) nb(i - 1, j, ihx2);
                if (i < nx - 1) nb(i + 1, j, ihx2);
                if (j > 0) nb(i, j - 1, ihy2);
                if (j < ny - 1) nb(i, j + 1, ihy2);
                trip.emplace_back(row_off + c, col_off + c, scale * diag);
            }
    };
    for (int c = 0; c < n; ++c) trip.emplace_back(c, c, sys.aC);
    add_laplacian(0, n, -1.0);
    for (int c = 0; c < n; ++c) trip.emplace_back(n + c, c, -sys.A * sys.d[c]);
    add_laplacian(n, 0, sys.B);
    for (int c = 0; c < n; ++c) trip.emplace_back(n + c, n + c, 1.0);

    Eigen::SparseMatrix<double> J(2 * n, 2 * n);
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success)
        throw SolverError("ch_step: sparse factorization of the block Jacobian failed", 0.0);
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), 2 * n);
    Eigen::VectorXd xm = lu.solve(bm);
    x.assign(xm.data(), xm.data() + 2 * n);
}

}  // namespace

CHStepResult ch_step(const ScalarField& phi_n, const ScalarField& sigma_n,
                     const VectorField& v_n, const PhysParams& p, const CHStepConfig& cfg) {
    cfg.validate();
    const Grid& g = phi_n.grid();
    sigma_n.require_grid(g, "ch_step");
    v_n.require_grid(g, "ch_step");
    if (max_abs(phi_n) >= 1.0) throw ContractError("ch_step: |phi_n| must be < 1");

    const size_t n = static_cast<size_t>(g.nx) * g.ny;
    const double tau = cfg.tau;
    const double aC = 1.0 / tau + p.alpha;
    const double lo = -1.0 + cfg.clip_margin;
    const double hi = 1.0 - cfg.clip_margin;
    const double wq = std::sqrt(g.cell_area());

    // Explicit data.
    ScalarField adv = advect_conservative(v_n, phi_n);
    std::vector<double> g1(n), g2(n);
    for (size_t k = 0; k < n; ++k) {
        g1[k] = phi_n.data()[k] / tau - adv.data()[k] + p.alpha * p.c0;
        g2[k] = p.A * p.theta0 * phi_n.data()[k] + p.chi * sigma_n.data()[k];
    }

    // Iterate storage: x = [phi; mu].
    std::vector<double> x(2 * n), fval(2 * n), delta(2 * n), cand(2 * n), fcand(2 * n);
    std::vector<double> lap(n);
    auto eval_residual = [&](const std::vector<double>& z, std::vector<double>& f) {
        const double* phi = z.data();
        const double* mu = z.data() + n;
        laplacian_into(g, mu, f.data());
        laplacian_into(g, phi, f.data() + n);
        for (size_t k = 0; k < n; ++k) {
            const double r = phi[k];
            const double psi0p = 0.5 * p.theta * std::log((1.0 + r) / (1.0 - r));
            f[k] = aC * r - f[k] - g1[k];
            f[k + n] = mu[k] - p.A * psi0p + p.B * f[k + n] + g2[k];
        }
    };
    auto interior = [&](const std::vector<double>& z) {
        for (size_t k = 0; k < n; ++k)
            if (z[k] < lo || z[k] > hi) return false;
        return true;
    };

    for (size_t k = 0; k < n; ++k) x[k] = std::clamp(phi_n.data()[k], lo, hi);
    // mu consistent with F2 = 0 at the initial iterate:
    // mu = A Psi0'(phi) - B L phi - g2.
    laplacian_into(g, x.data(), lap.data());
    for (size_t k = 0; k < n; ++k) {
        const double r = x[k];
        x[k + n] = p.A * 0.5 * p.theta * std::log((1.0 + r) / (1.0 - r)) - p.B * lap[k] - g2[k];
    }

    BlockSystem sys(g, aC, p);
    CHStepResult res;
    eval_residual(x, fval);
    double fnorm = nrm(fval) * wq;
    res.newton_residuals.push_back(fnorm);

    int clip_streak = 0;
    int iter = 0;
    std::vector<double> negf(2 * n);
    for (; iter < cfg.newton_max && fnorm > cfg.newton_tol; ++iter) {
        sys.set_state(x.data());
        for (size_t k = 0; k < 2 * n; ++k) negf[k] = -fval[k];
        if (sys.stiff()) {
            direct_solve(sys, negf, delta);
        } else {
            try {
                bicgstab(sys, negf, delta, cfg.linear_tol, cfg.linear_max);
            } catch (const SolverError&) {
                direct_solve(sys, negf, delta);
            }
        }

        double s = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 30; ++halving) {
            for (size_t k = 0; k < 2 * n; ++k) cand[k] = x[k] + s * delta[k];
            if (interior(cand)) {
                eval_residual(cand, fcand);
                const double fc = nrm(fcand) * wq;
                if (fc < fnorm) {
                    x.swap(cand);
                    fval.swap(fcand);
                    fnorm = fc;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if (accepted) {
            clip_streak = 0;
        } else {
            // Force the iterate into the barrier box.
            for (size_t k = 0; k < n; ++k) x[k] = std::clamp(x[k] + delta[k], lo, hi);
            for (size_t k = n; k < 2 * n; ++k) x[k] += delta[k];
            eval_residual(x, fval);
            fnorm = nrm(fval) * wq;
            ++clip_streak;
            if (clip_streak > cfg.newton_max / 2)
                throw BarrierFailureError(
                    "ch_step: iterates pinned at the barrier clip; tau is likely too large");
        }
        res.newton_residuals.push_back(fnorm);
    }
    if (fnorm > cfg.newton_tol)
        throw StepError("ch_step: Newton did not converge", fnorm);

    res.newton_iters = iter;
    res.phi_next = ScalarField(g);
    res.mu_next = ScalarField(g);
    std::copy(x.begin(), x.begin() + n, res.phi_next.data());
    std::copy(x.begin() + n, x.end(), res.mu_next.data());
    const double mean_prev = cell_mean(phi_n);
    const double mean_next = cell_mean(res.phi_next);
    res.mass_residual =
        std::abs(mean_next - p.c0 - (mean_prev - p.c0) / (1.0 + p.alpha * tau));
    return res;
}

double discrete_mass_law(double phi_bar0, std::span<const CHStepResult> history,
                         const PhysParams& p, const CHStepConfig& cfg) {
    if (history.empty()) throw ContractError("discrete_mass_law: empty history");
    double worst = 0.0;
    double expected = phi_bar0 - p.c0;
    const double decay = 1.0 / (1.0 + p.alpha * cfg.tau);
    for (const CHStepResult& r : history) {
        expected *= decay;
        worst = std::max(worst, std::abs(cell_mean(r.phi_next) - p.c0 - expected));
    }
    return worst;
}

}  // namespace nsch
