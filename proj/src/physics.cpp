#include "nsch/physics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nsch/operators.hpp"

namespace nsch {

void PhysParams::validate() const {
    if (!(A > 0.0)) throw ConfigError("H4: A must be > 0");
    if (!(B > 0.0)) throw ConfigError("H4: B must be > 0");
    if (!std::isfinite(chi)) throw ConfigError("H4: chi must be finite");
    if (!(alpha >= 0.0)) throw ConfigError("H4: alpha must be >= 0");
    if (!(c0 > -1.0 && c0 < 1.0)) throw ConfigError("H4: c0 must lie in (-1,1)");
    if (!(theta > 0.0 && theta < theta0))
        throw ConfigError("H2: potential temperatures must satisfy 0 < theta < theta0");
    if (!(eta1 > 0.0 && eta2 > 0.0)) throw ConfigError("H1: eta1 and eta2 must be > 0");
    if (!(m1 >= 0.0 && m1 < 1.0))
        throw ConfigError("phase space: m1 must lie in [0,1)");
    if (!(m2 >= 0.0)) throw ConfigError("phase space: m2 must be >= 0");
    if (std::abs(c0) > m1)
        throw ConfigError("phase space: c0 must lie in [-m1, m1]");
}

PotentialEval psi(double r, const PhysParams& p) {
    if (!(std::abs(r) < 1.0))
        throw PotentialDomainError("psi: argument outside (-1,1), r = " + std::to_string(r));
    if (std::abs(r) > 1.0 - 1e-14)
        throw OverflowGuardError("psi: argument within 1e-14 of the pure phases");
    const double th = p.theta, th0 = p.theta0;
    const double om = 1.0 - r, op = 1.0 + r;
    PotentialEval e;
    e.value = 0.5 * th * (om * std::log(om) + op * std::log(op)) + 0.5 * th0 * (1.0 - r * r);
    e.first = 0.5 * th * std::log(op / om) - th0 * r;
    const double denom = om * op;  // 1 - r^2
    e.second = th / denom - th0;
    e.third = 2.0 * th * r / (denom * denom);
    return e;
}

double psi0_prime(double r, const PhysParams& p) {
    return 0.5 * p.theta * std::log((1.0 + r) / (1.0 - r));
}

double eta(double r, const PhysParams& p) {
    const double rc = std::clamp(r, -1.0, 1.0);
    // eta1 (1+r)/2 + eta2 (1-r)/2, arranged so equal endpoints give the
    // constant bit-exactly.
    return p.eta2 + (p.eta1 - p.eta2) * 0.5 * (1.0 + rc);
}

ScalarField chemical_potential(const ScalarField& phi, const ScalarField& sigma,
                               const PhysParams& p) {
    sigma.require_grid(phi.grid(), "chemical_potential");
    ScalarField mu = laplacian_neumann(phi);
    const double* pphi = phi.data();
    const double* psig = sigma.data();
    double* pmu = mu.data();
    for (size_t k = 0; k < phi.size(); ++k) {
        const double r = pphi[k];
        if (!(std::abs(r) < 1.0))
            throw PotentialDomainError("chemical_potential: |phi| >= 1 at a cell");
        if (std::abs(r) > 1.0 - 1e-14)
            throw OverflowGuardError("chemical_potential: phi inside the overflow guard");
        const double psi_prime = 0.5 * p.theta * std::log((1.0 + r) / (1.0 - r)) - p.theta0 * r;
        pmu[k] = p.A * psi_prime - p.B * pmu[k] - p.chi * psig[k];
    }
    return mu;
}

HypothesisReport verify_hypotheses(const PhysParams& p, int n_samples, double eps0) {
    if (n_samples < 100) throw ContractError("verify_hypotheses: need n_samples >= 100");
    HypothesisReport rep;

    // (H1) on a uniform sweep of [-1,1] including the endpoints.
    double emin = eta(-1.0, p), emax = eta(-1.0, p);
    for (int k = 0; k <= n_samples; ++k) {
        const double r = -1.0 + 2.0 * k / n_samples;
        const double e = eta(r, p);
        emin = std::min(emin, e);
        emax = std::max(emax, e);
    }
    rep.eta_star = emin;
    rep.eta_star_upper = emax;
    rep.h1_ok = (emin > 0.0) && (emin >= p.eta_min() - 1e-12) && (emax <= p.eta_max() + 1e-12);

    // Chebyshev-clustered interior samples for the potential checks.
    std::vector<double> r(n_samples);
    for (int k = 0; k < n_samples; ++k)
        r[k] = std::cos(M_PI * (k + 0.5) / n_samples);  // in (-1,1), clustered at +-1
    std::sort(r.begin(), r.end());

    const double th = p.theta, th0 = p.theta0;
    auto psi0pp = [&](double z) { return th / (1.0 - z * z); };
    auto psi0p = [&](double z) { return 0.5 * th * std::log((1.0 + z) / (1.0 - z)); };

    bool convex_ok = true;
    for (double z : r)
        if (!(psi0pp(z) >= th * (1.0 - 1e-12))) convex_ok = false;
    bool mono_ok = true;
    for (size_t k = 1; k < r.size(); ++k) {
        if (r[k - 1] >= 1.0 - eps0 && psi0pp(r[k]) < psi0pp(r[k - 1]) * (1.0 - 1e-12))
            mono_ok = false;
        if (r[k] <= -1.0 + eps0 && psi0pp(r[k]) > psi0pp(r[k - 1]) * (1.0 + 1e-12))
            mono_ok = false;
    }
    rep.h2_ok = (th > 0.0) && (th0 > th) && convex_ok && mono_ok;

    // (H3): smallest C with Psi0''(z) <= C exp(C |Psi0'(z)|), located by
    // bisection on the log-space feasibility margin. The fit runs on a
    // doubled-density sample set (whose extreme points sit closer to +-1 and
    // dominate the constraint); the margin is then reported on the requested
    // set, where it must come out nonnegative.
    auto margin = [&](double C, const std::vector<double>& zs) {
        double worst = 1e300;
        for (double z : zs)
            worst = std::min(worst, std::log(C) + C * std::abs(psi0p(z)) - std::log(psi0pp(z)));
        return worst;  // >= 0 means the bound holds everywhere
    };
    std::vector<double> r_fit(2 * n_samples);
    for (int k = 0; k < 2 * n_samples; ++k)
        r_fit[k] = std::cos(M_PI * (k + 0.5) / (2 * n_samples));
    double lo = 1e-8, hi = 1.0;
    while (margin(hi, r_fit) < 0.0 && hi < 1e8) hi *= 2.0;
    rep.h3_ok = margin(hi, r_fit) >= 0.0;
    if (rep.h3_ok) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (margin(mid, r_fit) >= 0.0)
                hi = mid;
            else
                lo = mid;
        }
        rep.h3_fit_c = hi;
        rep.worst_h3_margin = margin(hi, r);
        rep.h3_ok = rep.worst_h3_margin >= -1e-9;
    }

    rep.h4_ok = (p.A > 0.0) && (p.B > 0.0) && std::isfinite(p.chi) && (p.alpha >= 0.0) &&
                (p.c0 > -1.0 && p.c0 < 1.0);
    return rep;
}

}  // namespace nsch
