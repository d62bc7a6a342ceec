#include <doctest.h>

#include <cmath>

#include "nsch/config.hpp"
#include "nsch/diagnostics.hpp"
#include "nsch/init.hpp"
#include "nsch/operators.hpp"
#include "nsch/stepper.hpp"
#include "oracle_dense.hpp"
#include "test_helpers.hpp"

using namespace nsch;
using namespace nsch::testing;

TEST_CASE("quiescent uniform state is a fixed point of the coupled step") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    ScalarField phi(g), sigma(g);
    phi.fill(p.c0);
    sigma.fill(5.0);
    State s = make_state(g, phi, sigma, VectorField(g), p);
    CHStepConfig cfg;
    for (int n = 0; n < 10; ++n) s = step(s, 1e-2, p, cfg);
    CHECK(max_diff(s.phi, phi) <= 1e-11);
    CHECK(max_diff(s.sigma, sigma) <= 1e-11);
    CHECK(max_abs(s.v) <= 1e-11);
}

TEST_CASE("energy of the zero state is A Psi(0) |Omega|") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;  // theta0 = 2 so Psi(0) = 1
    State s = make_state(g, ScalarField(g), ScalarField(g), VectorField(g), p);
    EnergyLedger e = energy(s, p);
    CHECK(e.E == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.D == doctest::Approx(0.0));
    CHECK(e.E_tilde >= 1.0);
}

TEST_CASE("Oono source vanishes when alpha is zero") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    p.alpha = 0.0;
    ScalarField phi = random_scalar(g, 81, 0.4);
    ScalarField sigma = random_scalar(g, 82, 1.0);
    State s = make_state(g, phi, sigma, streamfunction_velocity(g, 0.3), p);
    EnergyLedger e = energy(s, p);
    CHECK(e.source == 0.0);
    CHECK(e.D >= 0.0);
}

TEST_CASE("dissipation dominates its viscous part (H1 lower bound)") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    ScalarField phi = random_scalar(g, 83, 0.5);
    ScalarField sigma = random_scalar(g, 84, 1.0);
    State s = make_state(g, phi, sigma, streamfunction_velocity(g, 0.5), p);
    EnergyLedger e = energy(s, p);
    CHECK(e.D >= p.eta_min() * 2.0 * sym_grad_quadrature(s.v) * (1.0 - 1e-12));
}

TEST_CASE("bel audit: quiescent fixed point has zero residual") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    ScalarField phi(g), sigma(g);
    phi.fill(p.c0);
    sigma.fill(2.0);
    State s = make_state(g, phi, sigma, VectorField(g), p);
    CHStepConfig cfg;
    EnergyLedger e0 = energy(s, p);
    State s1 = step(s, 1e-2, p, cfg);
    EnergyLedger e1 = energy(s1, p);
    CHECK(std::abs(bel_audit(e0, e1, 1e-2)) <= 1e-11 * std::max(1.0, std::abs(e0.E)));
}

TEST_CASE("decoupled CH run never creates energy") {
    Grid g(24, 24, 1.0, 1.0);
    PhysParams p;
    p.chi = 0.0;
    p.alpha = 0.0;
    p.B = 0.01;
    ScalarField phi = random_scalar(g, 85, 0.3);
    State s = make_state(g, phi, ScalarField(g), VectorField(g), p);
    CHStepConfig cfg;
    EnergyLedger prev = energy(s, p);
    for (int n = 0; n < 20; ++n) {
        s = step(s, 0.05, p, cfg);
        EnergyLedger cur = energy(s, p);
        CHECK(bel_audit(prev, cur, 0.05) <= 1e-12 * std::abs(prev.E));
        prev = cur;
    }
}

TEST_CASE("one coupled 8x8 step matches the composed dense oracle") {
    Grid g(8, 8, 1.0, 1.0);
    PhysParams p;
    CHStepConfig cfg;
    cfg.tau = 1e-3;
    ScalarField phi = random_scalar(g, 86, 0.3);
    ScalarField sigma = random_scalar(g, 87, 2.0);
    State s = make_state(g, phi, sigma, streamfunction_velocity(g, 0.4), p);
    State fast = step(s, cfg.tau, p, cfg);
    State dense = oracle::dense_step(s, cfg.tau, p, cfg.newton_tol, cfg.clip_margin);
    CHECK(max_diff(fast.phi, dense.phi) <= 1e-9);
    CHECK(max_diff(fast.mu, dense.mu) <= 1e-9);
    CHECK(max_diff(fast.sigma, dense.sigma) <= 1e-9);
    CHECK(max_diff(fast.v, dense.v) <= 1e-9);
    CHECK(max_diff(fast.p, dense.p) <= 1e-9);
}

TEST_CASE("splitting is first order: tau-halving halves the defect") {
    RunConfig rc;
    rc.grid = Grid(32, 32, 1.0, 1.0);
    rc.init = "bubble";
    rc.params.B = 0.01;
    rc.params.m1 = 0.9;
    rc.sigma0 = 1.0;
    rc.sigma0_set = true;
    State s0 = make_initial_state(rc);
    PhysParams p = rc.params;
    CHStepConfig cfg;

    auto advance = [&](State s, double tau, int n) {
        for (int k = 0; k < n; ++k) s = step(s, tau, p, cfg);
        return s;
    };
    const double T = 0.02;
    State a = advance(s0, T / 4.0, 4);
    State b = advance(s0, T / 8.0, 8);
    State c = advance(s0, T / 16.0, 16);
    const double d1 = phase_distance(a, b).d;
    const double d2 = phase_distance(b, c).d;
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("E_tilde bands of increasingly energetic starts overlap after the transient") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    p.B = 0.01;
    CHStepConfig cfg;
    const double tau = 2e-3;
    double final_etilde[3];
    int idx = 0;
    for (double amp : {0.5, 5.0, 15.0}) {
        ScalarField phi = random_scalar(g, 90 + idx, 0.05);
        ScalarField sigma(g);
        sigma.fill(1.0);
        ScalarField dev = mean_free(random_scalar(g, 95 + idx, amp));
        for (size_t k = 0; k < sigma.size(); ++k) sigma.data()[k] += dev.data()[k];
        State s = make_state(g, phi, sigma, VectorField(g), p);
        for (int n = 0; n < 400; ++n) s = step(s, tau, p, cfg);
        final_etilde[idx++] = energy(s, p).E_tilde;
    }
    // all three land in a common band
    const double lo = std::min({final_etilde[0], final_etilde[1], final_etilde[2]});
    const double hi = std::max({final_etilde[0], final_etilde[1], final_etilde[2]});
    CHECK(hi - lo <= 0.2 * hi);
}

TEST_CASE("phase-space membership is forward invariant") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    p.B = 0.01;
    CHStepConfig cfg;
    ScalarField phi = random_scalar(g, 121, 0.05);
    for (size_t k = 0; k < phi.size(); ++k) phi.data()[k] += 0.3;  // mean near 0.3 <= m1
    ScalarField sigma = random_scalar(g, 122, 1.0);
    for (size_t k = 0; k < sigma.size(); ++k) sigma.data()[k] += 4.0;
    State s = make_state(g, phi, sigma, VectorField(g), p);
    REQUIRE(std::abs(cell_mean(s.phi)) <= p.m1);
    REQUIRE(std::abs(cell_mean(s.sigma)) <= p.m2);
    for (int n = 0; n < 40; ++n) {
        s = step(s, 2e-3, p, cfg);
        CHECK(max_abs(s.phi) < 1.0);
        CHECK(std::abs(cell_mean(s.phi)) <= p.m1 + 1e-12);
        CHECK(std::abs(cell_mean(s.sigma)) <= p.m2 + 1e-12);
        CHECK(l2_norm(divergence_mac(s.v)) <= 1e-10);
    }
}

TEST_CASE("invalid states are rejected before stepping") {
    Grid g(8, 8, 1.0, 1.0);
    PhysParams p;
    CHStepConfig cfg;
    State s = make_state(g, ScalarField(g), ScalarField(g), VectorField(g), p);
    s.v.u(2, 2) = 1.0;  // divergence violation
    CHECK_THROWS_AS(step(s, 1e-3, p, cfg), ContractError);
}
