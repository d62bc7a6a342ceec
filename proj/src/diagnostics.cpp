#include "nsch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nsch/elliptic.hpp"
#include "nsch/operators.hpp"

namespace nsch {

namespace {

ScalarField diff(const ScalarField& a, const ScalarField& b) {
    b.require_grid(a.grid(), "diagnostics");
    ScalarField d = a;
    for (size_t k = 0; k < d.size(); ++k) d.data()[k] -= b.data()[k];
    return d;
}

VectorField diff(const VectorField& a, const VectorField& b) {
    b.require_grid(a.grid(), "diagnostics");
    VectorField d = a;
    for (size_t k = 0; k < d.u_data().size(); ++k) d.u_data()[k] -= b.u_data()[k];
    for (size_t k = 0; k < d.w_data().size(); ++k) d.w_data()[k] -= b.w_data()[k];
    return d;
}

// Second differences: fxx, fyy at cells (mirror ghosts), fxy at nodes
// ((nx+1) x (ny+1); zero on wall nodes where the mirrored x-derivative
// vanishes).
struct SecondDiffs {
    ScalarField fxx, fyy;
    std::vector<double> fxy;
    int nx = 0, ny = 0;
    double node_weight(int i, int j) const {
        const double cx = (i == 0 || i == nx) ? 0.5 : 1.0;
        const double cy = (j == 0 || j == ny) ? 0.5 : 1.0;
        return cx * cy;
    }
};

SecondDiffs second_diffs(const ScalarField& f) {
    const Grid& g = f.grid();
    SecondDiffs s;
    s.nx = g.nx;
    s.ny = g.ny;
    s.fxx = ScalarField(g);
    s.fyy = ScalarField(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double c = f(i, j);
            const double fw = (i > 0) ? f(i - 1, j) : c;
            const double fe = (i < g.nx - 1) ? f(i + 1, j) : c;
            const double fs = (j > 0) ? f(i, j - 1) : c;
            const double fn = (j < g.ny - 1) ? f(i, j + 1) : c;
            s.fxx(i, j) = (fw - 2.0 * c + fe) / (g.hx * g.hx);
            s.fyy(i, j) = (fs - 2.0 * c + fn) / (g.hy * g.hy);
        }
    s.fxy.assign(static_cast<size_t>(g.nx + 1) * (g.ny + 1), 0.0);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            s.fxy[static_cast<size_t>(j) * (g.nx + 1) + i] =
                (f(i, j) - f(i - 1, j) - f(i, j - 1) + f(i - 1, j - 1)) / (g.hx * g.hy);
    return s;
}

double hessian_sq(const ScalarField& f) {
    const Grid& g = f.grid();
    SecondDiffs s = second_diffs(f);
    double acc = cell_dot(s.fxx, s.fxx) + cell_dot(s.fyy, s.fyy);
    double nodes = 0.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const double v = s.fxy[static_cast<size_t>(j) * (g.nx + 1) + i];
            nodes += 2.0 * v * v * s.node_weight(i, j);
        }
    return acc + nodes * g.cell_area();
}

}  // namespace

double h1_norm(const ScalarField& f) {
    return std::sqrt(cell_dot(f, f) + grad_norm_sq(f));
}

double h2_norm(const ScalarField& f) {
    return std::sqrt(cell_dot(f, f) + grad_norm_sq(f) + hessian_sq(f));
}

double h1_norm_vec(const VectorField& v) {
    return std::sqrt(face_dot(v, v) + grad_quadrature(v));
}

double w23_norm(const ScalarField& f) {
    const Grid& g = f.grid();
    double acc = 0.0;
    for (size_t k = 0; k < f.size(); ++k) acc += std::pow(std::abs(f.data()[k]), 3.0);
    // first derivatives on faces (boundary faces vanish under mirror ghosts)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            acc += std::pow(std::abs((f(i, j) - f(i - 1, j)) / g.hx), 3.0);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            acc += std::pow(std::abs((f(i, j) - f(i, j - 1)) / g.hy), 3.0);
    SecondDiffs s = second_diffs(f);
    for (size_t k = 0; k < s.fxx.size(); ++k)
        acc += std::pow(std::abs(s.fxx.data()[k]), 3.0) +
               std::pow(std::abs(s.fyy.data()[k]), 3.0);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            acc += std::pow(std::abs(s.fxy[static_cast<size_t>(j) * (g.nx + 1) + i]), 3.0) *
                   s.node_weight(i, j);
    return std::cbrt(acc * g.cell_area());
}

PhaseDistance phase_distance(const State& s1, const State& s2) {
    s2.phi.require_grid(s1.phi.grid(), "phase_distance");
    PhaseDistance pd;
    pd.d = l2_norm(diff(s1.v, s2.v)) + h1_norm(diff(s1.phi, s2.phi)) +
           l2_norm(diff(s1.sigma, s2.sigma));
    return pd;
}

WeakDistance weak_distance(const State& s1, const State& s2) {
    s2.phi.require_grid(s1.phi.grid(), "weak_distance");
    WeakDistance wd;
    StokesSolution st = stokes_solve(diff(s1.v, s2.v));
    wd.components[0] = 0.5 * st.energy_pairing;
    wd.components[1] = 0.5 * std::pow(norms(diff(s1.phi, s2.phi)).h1_dual, 2.0);
    wd.components[2] = 0.5 * std::pow(norms(diff(s1.sigma, s2.sigma)).h1_dual, 2.0);
    wd.components[3] = std::abs(cell_mean(s1.phi) - cell_mean(s2.phi));
    wd.W = wd.components[0] + wd.components[1] + wd.components[2] + wd.components[3];
    return wd;
}

double z_integrand(const State& s, const PhysParams& p) {
    double psi_l1 = 0.0;
    for (size_t k = 0; k < s.phi.size(); ++k) {
        const double r = s.phi.data()[k];
        if (!(std::abs(r) < 1.0))
            throw PotentialDomainError("z_integrand: |phi| must be < 1");
        psi_l1 += std::abs(0.5 * p.theta * std::log((1.0 + r) / (1.0 - r)) - p.theta0 * r);
    }
    psi_l1 *= s.phi.grid().cell_area();
    const double w23 = w23_norm(s.phi);
    const double h2 = h2_norm(s.phi);
    const double sh1 = h1_norm(s.sigma);
    return grad_quadrature(s.v) + w23 * w23 + h2 * h2 * h2 * h2 + psi_l1 + sh1 * sh1 + 1.0;
}

double separation_gap(std::span<const State> trajectory, double t_min) {
    if (trajectory.empty()) throw ContractError("separation_gap: empty trajectory");
    const double t_end = trajectory.back().t;
    if (t_min > t_end)
        throw ContractError("separation_gap: window starts past the trajectory end");
    double gap = 1.0;
    bool found = false;
    for (const State& s : trajectory) {
        if (s.t < t_min) continue;
        gap = std::min(gap, 1.0 - max_abs(s.phi));
        found = true;
    }
    if (!found) throw ContractError("separation_gap: empty window");
    return gap;
}

double hausdorff_semidist(std::span<const State> set_a, std::span<const State> set_b) {
    if (set_a.empty() || set_b.empty())
        throw ContractError("hausdorff_semidist: empty input set");
    double worst = 0.0;
    for (const State& a : set_a) {
        double best = std::numeric_limits<double>::infinity();
        for (const State& b : set_b) best = std::min(best, phase_distance(a, b).d);
        worst = std::max(worst, best);
    }
    return worst;
}

AttractionFit fit_exponential_attraction(std::span<const double> times,
                                         std::span<const double> dists) {
    if (times.size() != dists.size())
        throw ContractError("fit_exponential_attraction: length mismatch");
    std::vector<double> t, y;
    for (size_t k = 0; k < times.size(); ++k) {
        if (dists[k] < 0.0)
            throw ContractError("fit_exponential_attraction: negative distance");
        if (dists[k] > 1e-13) {
            t.push_back(times[k]);
            y.push_back(std::log(dists[k]));
        }
    }
    if (t.size() < 4)
        throw ContractError("fit_exponential_attraction: fewer than 4 usable points");
    const double n = static_cast<double>(t.size());
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (size_t k = 0; k < t.size(); ++k) {
        st += t[k];
        sy += y[k];
        stt += t[k] * t[k];
        sty += t[k] * y[k];
    }
    const double denom = n * stt - st * st;
    if (denom <= 0.0) throw ContractError("fit_exponential_attraction: degenerate times");
    const double slope = (n * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / n;
    AttractionFit fit;
    fit.J = std::exp(intercept);
    fit.omega = -slope;
    double rss = 0.0;
    for (size_t k = 0; k < t.size(); ++k) {
        const double r = y[k] - (intercept + slope * t[k]);
        rss += r * r;
    }
    fit.rms_log_residual = std::sqrt(rss / n);
    return fit;
}

double smoothing_ratio(const State& s0, double perturbation_size, double t,
                       const PhysParams& p, const CHStepConfig& cfg) {
    if (!(perturbation_size > 0.0))
        throw ContractError("smoothing_ratio: degenerate pair (zero perturbation)");
    if (perturbation_size > 1e-2)
        throw ContractError("smoothing_ratio: perturbation_size must be <= 1e-2");
    if (!(t > 0.0)) throw ContractError("smoothing_ratio: t must be > 0");

    const Grid& g = s0.phi.grid();
    ScalarField bump(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            bump(i, j) = std::cos(M_PI * g.cell_x(i) / g.Lx) * std::cos(M_PI * g.cell_y(j) / g.Ly);
    const double bnorm = h1_norm(bump);
    double scale = perturbation_size / bnorm;

    // Re-separate: keep the perturbed field strictly inside the barrier.
    const double cap = 1.0 - std::max(cfg.clip_margin, 1e-12);
    State pert = s0;
    for (size_t k = 0; k < pert.phi.size(); ++k) {
        double val = s0.phi.data()[k] + scale * bump.data()[k];
        pert.phi.data()[k] = std::clamp(val, -cap, cap);
    }

    const double d0 = phase_distance(s0, pert).d;
    if (d0 < 1e-13) throw ContractError("smoothing_ratio: degenerate pair");

    const int nsteps = std::max(1, static_cast<int>(std::llround(t / cfg.tau)));
    State a = s0, b = pert;
    for (int k = 0; k < nsteps; ++k) {
        a = step(a, cfg.tau, p, cfg);
        b = step(b, cfg.tau, p, cfg);
    }
    const double num = h1_norm_vec(diff(a.v, b.v)) + h2_norm(diff(a.phi, b.phi)) +
                       h1_norm(diff(a.sigma, b.sigma));
    return num / d0;
}

}  // namespace nsch
