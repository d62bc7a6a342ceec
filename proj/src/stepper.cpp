#include "nsch/stepper.hpp"

#include <algorithm>
#include <cmath>

#include "nsch/elliptic.hpp"
#include "nsch/operators.hpp"

namespace nsch {

void validate_state(const State& s) {
    if (!s.phi.finite() || !s.sigma.finite() || !s.v.finite())
        throw ContractError("state: non-finite field");
    if (max_abs(s.phi) >= 1.0) throw ContractError("state: |phi| must be < 1");
    const double divn = l2_norm(divergence_mac(s.v));
    if (divn > 1e-10)
        throw ContractError("state: velocity divergence above tolerance, " +
                            std::to_string(divn));
}

State step(const State& s, double tau, const PhysParams& p, const CHStepConfig& cfg,
           StepStats* stats) {
    validate_state(s);
    CHStepConfig c = cfg;
    c.tau = tau;
    CHStepResult ch = ch_step(s.phi, s.sigma, s.v, p, c);
    SigmaStepResult sg = sigma_step(s.sigma, ch.phi_next, s.v, p, tau);
    FluidStepResult fl = ns_step(s.v, ch.phi_next, ch.mu_next, sg.sigma_next, s.p, p, tau);

    State out;
    out.t = s.t + tau;
    out.v = fl.v_next;
    out.phi = ch.phi_next;
    out.sigma = sg.sigma_next;
    out.mu = ch.mu_next;
    out.p = fl.p_next;
    if (stats) {
        stats->newton_iters = ch.newton_iters;
        stats->mass_residual = ch.mass_residual;
        stats->div_residual = fl.div_residual;
        stats->momentum_iters = fl.momentum_iters;
    }
    return out;
}

double e_tilde_shift(const Grid& g, const PhysParams& p) {
    // min Psi over [-1,1] by dense sampling; Psi is continuous up to the
    // endpoints where it equals theta ln 2.
    double psimin = p.theta * std::log(2.0);
    const int m = 4096;
    for (int k = 1; k < m; ++k) {
        const double r = -1.0 + 2.0 * static_cast<double>(k) / m;
        const double om = 1.0 - r, op = 1.0 + r;
        const double val = 0.5 * p.theta * (om * std::log(om) + op * std::log(op)) +
                           0.5 * p.theta0 * (1.0 - r * r);
        psimin = std::min(psimin, val);
    }
    const double omega = g.area();
    return omega * (p.A * std::max(0.0, -psimin) +
                    std::abs(p.chi) * (p.m2 * std::sqrt(omega) + 2.0)) +
           1.0;
}

EnergyLedger energy(const State& s, const PhysParams& p) {
    const Grid& g = s.phi.grid();
    EnergyLedger e;
    e.t = s.t;

    double bulk = 0.0;
    for (size_t k = 0; k < s.phi.size(); ++k) {
        const double r = s.phi.data()[k];
        if (!(std::abs(r) < 1.0)) throw ContractError("energy: |phi| must be < 1");
        const double om = 1.0 - r, op = 1.0 + r;
        const double psi_val = 0.5 * p.theta * (om * std::log(om) + op * std::log(op)) +
                               0.5 * p.theta0 * (1.0 - r * r);
        const double sg = s.sigma.data()[k];
        bulk += p.A * psi_val + 0.5 * sg * sg + p.chi * sg * (1.0 - r);
    }
    e.E = 0.5 * face_dot(s.v, s.v) + bulk * g.cell_area() + 0.5 * p.B * grad_norm_sq(s.phi);

    ScalarField chem_flux = s.sigma;  // sigma + chi (1 - phi), constants drop under grad
    for (size_t k = 0; k < chem_flux.size(); ++k)
        chem_flux.data()[k] -= p.chi * s.phi.data()[k];
    e.D = dissipation_quadrature(s.v, s.phi, p) + grad_norm_sq(s.mu) +
          grad_norm_sq(chem_flux);

    double src = 0.0;
    for (size_t k = 0; k < s.phi.size(); ++k)
        src += -p.alpha * (s.phi.data()[k] - p.c0) * s.mu.data()[k];
    e.source = src * g.cell_area();

    const double phin2 = cell_dot(s.phi, s.phi);
    const double sign2 = cell_dot(s.sigma, s.sigma);
    e.E_tilde = e.E + 0.5 * (phin2 + sign2) + e_tilde_shift(g, p);

    const double conv = cell_dot(advect_conservative(s.v, s.phi), s.mu);
    e.lambda1 = 0.5 * grad_quadrature(s.v) + 0.5 * grad_norm_sq(s.mu) + conv +
                0.5 * grad_norm_sq(s.sigma);
    return e;
}

double bel_audit(const EnergyLedger& prev, const EnergyLedger& next, double tau) {
    return next.E - prev.E + tau * next.D - tau * next.source;
}

double bel_tolerance(double tau, double h) {
    // c_audit frozen from the reference spinodal calibration (64^2, tau 1e-3,
    // seeded noise, chi 0.5): the signed residual never exceeded -2.8e-9
    // there, and post-transient magnitudes fluctuate at ~8x the tau(tau+h^2)
    // shape. The budget sits above that fluctuation scale.
    constexpr double c_audit = 50.0;
    return c_audit * tau * (tau + h * h);
}

double bel_tolerance(double tau, const Grid& g) {
    return bel_tolerance(tau, std::max(g.hx, g.hy));
}

}  // namespace nsch
