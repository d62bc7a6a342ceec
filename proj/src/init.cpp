#include "nsch/init.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nsch/physics.hpp"

namespace nsch {

State make_initial_state(const RunConfig& cfg) {
    const Grid& g = cfg.grid;
    State s;
    s.t = 0.0;
    s.phi = ScalarField(g);
    s.sigma = ScalarField(g);
    s.p = ScalarField(g);
    s.v = VectorField(g);

    const double mean_target = cfg.phi0_mean_value();
    if (cfg.init == "quiescent") {
        s.phi.fill(mean_target);
    } else if (cfg.init == "spinodal") {
        std::mt19937 rng(static_cast<uint32_t>(cfg.seed));
        std::uniform_real_distribution<double> dist(-cfg.noise_amp, cfg.noise_amp);
        for (size_t k = 0; k < s.phi.size(); ++k) s.phi.data()[k] = mean_target + dist(rng);
        const double shift = mean_target - cell_mean(s.phi);
        for (size_t k = 0; k < s.phi.size(); ++k) s.phi.data()[k] += shift;
    } else if (cfg.init == "bubble") {
        const double width = std::sqrt(cfg.params.B / cfg.params.A);
        const double radius = 0.25 * std::min(g.Lx, g.Ly);
        const double xc = 0.5 * g.Lx, yc = 0.5 * g.Ly;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double dx = g.cell_x(i) - xc, dy = g.cell_y(j) - yc;
                const double d = std::sqrt(dx * dx + dy * dy);
                const double val = std::tanh((radius - d) / width);
                s.phi(i, j) = std::clamp(val, -(1.0 - 1e-9), 1.0 - 1e-9);
            }
    } else {
        throw ConfigError("make_initial_state: unknown generator '" + cfg.init + "'");
    }

    s.sigma.fill(cfg.sigma0_value());

    // Phase-space membership (Theorem-level admissibility).
    if (max_abs(s.phi) >= 1.0)
        throw ConfigError("make_initial_state: |phi0| must be < 1");
    if (std::abs(cell_mean(s.phi)) > cfg.params.m1 + 1e-12)
        throw ConfigError("make_initial_state: phase space requires |mean phi0| <= m1");
    if (std::abs(cell_mean(s.sigma)) > cfg.params.m2 + 1e-12)
        throw ConfigError("make_initial_state: phase space requires |mean sigma0| <= m2");

    s.mu = chemical_potential(s.phi, s.sigma, cfg.params);
    return s;
}

}  // namespace nsch
