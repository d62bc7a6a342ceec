#include <doctest.h>

#include <cmath>

#include "nsch/elliptic.hpp"
#include "nsch/fluid.hpp"
#include "nsch/operators.hpp"
#include "test_helpers.hpp"

using namespace nsch;
using namespace nsch::testing;

TEST_CASE("leray projection kills gradients") {
    Grid g(24, 20, 1.0, 1.2);
    ScalarField pot = random_scalar(g, 51);
    VectorField grad = gradient_cc(pot);
    VectorField out = leray_project(grad);
    CHECK(l2_norm(out) <= 1e-9 * l2_norm(grad));
}

TEST_CASE("leray projection fixes divergence-free fields") {
    Grid g(24, 24, 1.0, 1.0);
    VectorField v = streamfunction_velocity(g);
    VectorField out = leray_project(v);
    CHECK(max_diff(out, v) <= 1e-10 * std::max(1.0, max_abs(v)));
}

TEST_CASE("leray projection is idempotent and linear with small divergence") {
    Grid g(20, 28, 1.5, 0.8);
    VectorField a = random_full_vector(g, 52);
    VectorField b = random_full_vector(g, 53);
    VectorField pa = leray_project(a);
    CHECK(l2_norm(divergence_mac(pa)) <= 1e-10);
    VectorField ppa = leray_project(pa);
    CHECK(max_diff(ppa, pa) <= 1e-10 * std::max(1.0, l2_norm(pa)));

    // linearity: P(a + 2b) = P(a) + 2 P(b)
    VectorField ab = a;
    for (size_t k = 0; k < ab.u_data().size(); ++k) ab.u_data()[k] += 2.0 * b.u_data()[k];
    for (size_t k = 0; k < ab.w_data().size(); ++k) ab.w_data()[k] += 2.0 * b.w_data()[k];
    VectorField pab = leray_project(ab);
    VectorField pb = leray_project(b);
    double worst = 0.0;
    for (size_t k = 0; k < pab.u_data().size(); ++k)
        worst = std::max(worst,
                         std::abs(pab.u_data()[k] - pa.u_data()[k] - 2.0 * pb.u_data()[k]));
    for (size_t k = 0; k < pab.w_data().size(); ++k)
        worst = std::max(worst,
                         std::abs(pab.w_data()[k] - pa.w_data()[k] - 2.0 * pb.w_data()[k]));
    CHECK(worst <= 1e-11);
}

TEST_CASE("stokes solve: zero input") {
    Grid g(16, 16, 1.0, 1.0);
    StokesSolution s = stokes_solve(VectorField(g));
    CHECK(max_abs(s.u) == 0.0);
    CHECK(max_abs(s.p) == 0.0);
    CHECK(s.energy_pairing == 0.0);
}

TEST_CASE("stokes solve: residual audit, incompressibility, pairing identity") {
    Grid g(24, 24, 1.0, 1.0);
    VectorField f = random_full_vector(g, 61);
    StokesSolution s = stokes_solve(f);
    CHECK(l2_norm(divergence_mac(s.u)) <= 1e-10);

    // -Lap u + grad p = P f on interior faces
    VectorField au = apply_vector_laplacian(s.u);
    VectorField gp = gradient_cc(s.p);
    VectorField pf = leray_project(f);
    double res = 0.0, scale = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            res += std::pow(au.u(i, j) + gp.u(i, j) - pf.u(i, j), 2.0);
            scale += pf.u(i, j) * pf.u(i, j);
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            res += std::pow(au.w(i, j) + gp.w(i, j) - pf.w(i, j), 2.0);
            scale += pf.w(i, j) * pf.w(i, j);
        }
    CHECK(std::sqrt(res) <= 1e-9 * std::sqrt(scale));

    // (f, u) = ||grad u||^2 and the pairing is nonnegative
    CHECK(s.energy_pairing >= 0.0);
    CHECK(std::abs(s.energy_pairing - grad_quadrature(s.u)) <= 1e-9 * s.energy_pairing);

    // mean-zero pressure convention
    CHECK(std::abs(cell_mean(s.p)) <= 1e-12);
}

TEST_CASE("discrete Korn inequality on random no-slip fields") {
    Grid g(20, 24, 1.0, 1.3);
    for (unsigned seed = 0; seed < 20; ++seed) {
        VectorField v = random_interior_vector(g, 200 + seed);
        const double gq = grad_quadrature(v);
        const double dq = sym_grad_quadrature(v);
        CHECK(gq <= 2.0 * dq * (1.0 + 1e-12));
        CHECK(dq <= gq * (1.0 + 1e-12));
        // exact discrete identity 2||Du||^2 = ||grad u||^2 + ||div u||^2
        const double divsq = cell_dot(divergence_mac(v), divergence_mac(v));
        CHECK(2.0 * dq == doctest::Approx(gq + divsq).epsilon(1e-12));
    }
}

TEST_CASE("viscous operator matches its quadrature and stays nonnegative") {
    Grid g(16, 20, 1.0, 1.0);
    PhysParams p;
    ScalarField phi = random_scalar(g, 71, 0.8);
    VectorField v = random_interior_vector(g, 72);
    VectorField kv = apply_viscous(v, phi, p);
    const double dq = dissipation_quadrature(v, phi, p);
    CHECK(dq >= 0.0);
    CHECK(face_dot(kv, v) == doctest::Approx(dq).epsilon(1e-12));
    // lower bound by the constant-viscosity quadrature with eta_*
    CHECK(dq >= p.eta_min() * 2.0 * sym_grad_quadrature(v) * (1.0 - 1e-12));
}

TEST_CASE("equal pure-phase viscosities reproduce the constant-viscosity operator bitwise") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    p.eta1 = 1.5;
    p.eta2 = 1.5;
    VectorField v = random_interior_vector(g, 73);
    ScalarField phi_a = random_scalar(g, 74, 0.9);
    ScalarField phi_b(g);  // constant zero
    VectorField ka = apply_viscous(v, phi_a, p);
    VectorField kb = apply_viscous(v, phi_b, p);
    CHECK(max_diff(ka, kb) == 0.0);
}

TEST_CASE("ns_step: rest state with zero force stays at rest") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    p.chi = 0.0;
    ScalarField phi(g), mu(g), sigma(g), pr(g);
    FluidStepResult r = ns_step(VectorField(g), phi, mu, sigma, pr, p, 1e-2);
    CHECK(max_abs(r.v_next) == 0.0);
    CHECK(max_abs(r.p_next) <= 1e-14);
    CHECK(r.div_residual <= 1e-12);
}

TEST_CASE("ns_step: unforced viscous flow decays monotonically") {
    Grid g(24, 24, 1.0, 1.0);
    PhysParams p;
    p.chi = 0.0;
    ScalarField phi(g), mu(g), sigma(g), pr(g);
    VectorField v = streamfunction_velocity(g, 1.0);
    double norm_prev = l2_norm(v);
    const double tau = 1e-3;
    for (int n = 0; n < 100; ++n) {
        FluidStepResult r = ns_step(v, phi, mu, sigma, pr, p, tau);
        CHECK(r.div_residual <= 1e-10);
        v = r.v_next;
        pr = r.p_next;
        const double norm = l2_norm(v);
        CHECK(norm <= norm_prev * (1.0 + 1e-12));
        norm_prev = norm;
        for (int j = 0; j < g.ny; ++j) {
            CHECK(v.u(0, j) == 0.0);
            CHECK(v.u(g.nx, j) == 0.0);
        }
    }
}

TEST_CASE("ns_step rejects non-separated phases") {
    Grid g(8, 8, 1.0, 1.0);
    PhysParams p;
    ScalarField phi(g), mu(g), sigma(g), pr(g);
    phi.fill(1.0);
    CHECK_THROWS_AS(ns_step(VectorField(g), phi, mu, sigma, pr, p, 1e-2), ContractError);
}
