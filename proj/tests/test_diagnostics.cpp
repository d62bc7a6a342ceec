#include <doctest.h>

#include <cmath>
#include <vector>

#include "nsch/diagnostics.hpp"
#include "nsch/operators.hpp"
#include "test_helpers.hpp"

using namespace nsch;
using namespace nsch::testing;

namespace {

State random_state(const Grid& g, unsigned seed, const PhysParams& p, double phi_amp = 0.5) {
    return make_state(g, random_scalar(g, seed, phi_amp), random_scalar(g, seed + 1, 1.0),
                      streamfunction_velocity(g, 0.2 + 0.1 * (seed % 3)), p);
}

}  // namespace

TEST_CASE("phase distance satisfies the metric axioms on sampled triples") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    for (unsigned seed : {10u, 20u, 30u}) {
        State a = random_state(g, seed, p);
        State b = random_state(g, seed + 100, p);
        State c = random_state(g, seed + 200, p);
        CHECK(phase_distance(a, a).d <= 1e-12);
        CHECK(phase_distance(a, b).d ==
              doctest::Approx(phase_distance(b, a).d).epsilon(1e-12));
        CHECK(phase_distance(a, c).d <=
              phase_distance(a, b).d + phase_distance(b, c).d + 1e-12);
        CHECK(phase_distance(a, b).d > 0.0);
    }
}

TEST_CASE("phase distance reduces to the H1 norm when only phi differs") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    State a = random_state(g, 7, p);
    State b = a;
    ScalarField bump = random_scalar(g, 8, 0.1);
    for (size_t k = 0; k < b.phi.size(); ++k) b.phi.data()[k] += bump.data()[k];
    ScalarField d = b.phi;
    for (size_t k = 0; k < d.size(); ++k) d.data()[k] -= a.phi.data()[k];
    CHECK(phase_distance(a, b).d == doctest::Approx(h1_norm(d)).epsilon(1e-12));
}

TEST_CASE("weak distance: zero for identical states, gradient velocity differences vanish") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    State a = random_state(g, 17, p);
    WeakDistance w0 = weak_distance(a, a);
    CHECK(w0.W <= 1e-12);

    State b = a;
    ScalarField pot = random_scalar(g, 18, 1.0);
    VectorField grad = gradient_cc(pot);
    for (size_t k = 0; k < b.v.u_data().size(); ++k) b.v.u_data()[k] += grad.u_data()[k];
    for (size_t k = 0; k < b.v.w_data().size(); ++k) b.v.w_data()[k] += grad.w_data()[k];
    WeakDistance w = weak_distance(a, b);
    CHECK(w.components[0] <= 1e-12);  // S^{-1} annihilates pure gradients
    CHECK(w.components[1] <= 1e-13);
    CHECK(w.components[2] <= 1e-13);
}

TEST_CASE("weak norm is dominated by the strong norm on random pairs") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    // measure the norm-equivalence constant once, then check the ordering
    double c_grid = 0.0;
    for (unsigned seed : {40u, 41u, 42u}) {
        State a = random_state(g, seed, p);
        State b = random_state(g, seed + 500, p);
        WeakDistance w = weak_distance(a, b);
        const double d = phase_distance(a, b).d;
        const double mean_term = w.components[3];
        c_grid = std::max(c_grid, (w.W - mean_term) / (d * d));
    }
    for (unsigned seed : {50u, 51u, 52u, 53u}) {
        State a = random_state(g, seed, p);
        State b = random_state(g, seed + 500, p);
        WeakDistance w = weak_distance(a, b);
        const double d = phase_distance(a, b).d;
        CHECK(w.W <= 1.05 * c_grid * d * d + w.components[3]);
    }
}

TEST_CASE("z integrand: quiescent state reduces to the constant term") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;  // Psi'(0) = 0
    State s = make_state(g, ScalarField(g), ScalarField(g), VectorField(g), p);
    CHECK(z_integrand(s, p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("z integrand: W^{2,3} term against an extended-precision quadrature") {
    // phi = 0.5 cos(pi x): continuum norms computed with long double Simpson.
    Grid g(64, 64, 1.0, 1.0);
    ScalarField phi(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) phi(i, j) = 0.5 * std::cos(M_PI * g.cell_x(i));

    auto simpson = [](auto f, int n) {
        long double acc = f(0.0L) + f(1.0L);
        for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0L : 2.0L) * f(k / static_cast<long double>(n));
        return acc / (3.0L * n);
    };
    const long double a = 0.5L;
    auto integrand = [&](long double x) {
        const long double v = std::abs(a * std::cos(M_PI * x));
        const long double dx = std::abs(a * M_PI * std::sin(M_PI * x));
        const long double dxx = std::abs(a * M_PI * M_PI * std::cos(M_PI * x));
        return v * v * v + dx * dx * dx + dxx * dxx * dxx;
    };
    const double exact = std::cbrt(static_cast<double>(simpson(integrand, 4096)));
    CHECK(w23_norm(phi) == doctest::Approx(exact).epsilon(5e-3));  // O(h^2) at 64^2
}

TEST_CASE("z integrand grows when velocity is added") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    ScalarField phi = random_scalar(g, 19, 0.4);
    ScalarField sigma = random_scalar(g, 20, 1.0);
    State still = make_state(g, phi, sigma, VectorField(g), p);
    State moving = make_state(g, phi, sigma, streamfunction_velocity(g, 0.8), p);
    CHECK(z_integrand(moving, p) > z_integrand(still, p));
}

TEST_CASE("separation gap") {
    Grid g(8, 8, 1.0, 1.0);
    PhysParams p;
    std::vector<State> traj;
    for (int n = 0; n < 5; ++n) {
        ScalarField phi(g);
        phi.fill(0.0);
        phi(2, 2) = 0.90 + 0.01 * n;  // max |phi| grows to 0.94
        State s = make_state(g, phi, ScalarField(g), VectorField(g), p);
        s.t = 0.1 * n;
        traj.push_back(std::move(s));
    }
    CHECK(separation_gap(traj, 0.0) == doctest::Approx(1.0 - 0.94).epsilon(1e-12));
    CHECK(separation_gap(traj, 0.35) == doctest::Approx(1.0 - 0.94).epsilon(1e-12));
    CHECK_THROWS_AS(separation_gap(traj, 1.0), ContractError);

    std::vector<State> constant;
    ScalarField z(g);
    constant.push_back(make_state(g, z, ScalarField(g), VectorField(g), p));
    CHECK(separation_gap(constant, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("hausdorff semidistance") {
    Grid g(8, 8, 1.0, 1.0);
    PhysParams p;
    State s1 = random_state(g, 60, p);
    State s2 = random_state(g, 61, p);
    State s3 = random_state(g, 62, p);

    std::vector<State> a{s1, s2};
    std::vector<State> b{s1, s2, s3};
    CHECK(hausdorff_semidist(a, b) <= 1e-12);  // A subset of B

    std::vector<State> single1{s1}, single2{s2};
    CHECK(hausdorff_semidist(single1, single2) ==
          doctest::Approx(phase_distance(s1, s2).d).epsilon(1e-12));

    // asymmetry witness: A = {s1}, B = {s1, far}; dist(A,B)=0 but dist(B,A)>0
    std::vector<State> setA{s1}, setB{s1, s3};
    CHECK(hausdorff_semidist(setA, setB) <= 1e-12);
    CHECK(hausdorff_semidist(setB, setA) > 1e-3);

    std::vector<State> empty;
    CHECK_THROWS_AS(hausdorff_semidist(empty, setA), ContractError);
}

TEST_CASE("exponential fit") {
    SUBCASE("exact exponential is recovered") {
        std::vector<double> t, d;
        for (int k = 0; k < 10; ++k) {
            t.push_back(0.5 * k);
            d.push_back(std::exp(-2.0 * 0.5 * k));
        }
        AttractionFit f = fit_exponential_attraction(t, d);
        CHECK(f.omega == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(f.J == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(f.rms_log_residual <= 1e-10);
    }
    SUBCASE("fully attracted data cannot be fitted") {
        std::vector<double> t{0.0, 1.0, 2.0, 3.0, 4.0};
        std::vector<double> d{1e-14, 1e-14, 5e-15, 1e-15, 1e-16};
        CHECK_THROWS_AS(fit_exponential_attraction(t, d), ContractError);
    }
    SUBCASE("censoring keeps only distances above the round-off floor") {
        std::vector<double> t{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
        std::vector<double> d{1.0, 0.1, 0.01, 1e-3, 1e-14, 1e-15};
        AttractionFit f = fit_exponential_attraction(t, d);
        CHECK(f.omega == doctest::Approx(std::log(10.0)).epsilon(1e-10));
    }
}

TEST_CASE("oono mean decay supplies an analytic attraction channel") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    p.alpha = 0.5;
    p.chi = 0.0;
    CHStepConfig cfg;
    const double tau = 0.01;
    ScalarField phi(g);
    phi.fill(0.2);
    State s = make_state(g, phi, ScalarField(g), VectorField(g), p);
    State target = make_state(g, ScalarField(g), ScalarField(g), VectorField(g), p);
    std::vector<double> times, dists;
    for (int n = 1; n <= 60; ++n) {
        s = step(s, tau, p, cfg);
        times.push_back(s.t);
        dists.push_back(phase_distance(s, target).d);
    }
    AttractionFit f = fit_exponential_attraction(times, dists);
    const double discrete_rate = std::log(1.0 + p.alpha * tau) / tau;
    CHECK(f.omega == doctest::Approx(discrete_rate).epsilon(0.05));
}

TEST_CASE("separation gap can only shrink under cadence refinement") {
    Grid g(8, 8, 1.0, 1.0);
    PhysParams p;
    std::vector<State> fine;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> amp(0.80, 0.95);
    for (int n = 0; n < 12; ++n) {
        ScalarField phi(g);
        phi(3, 4) = amp(rng);
        State s = make_state(g, phi, ScalarField(g), VectorField(g), p);
        s.t = 0.05 * n;
        fine.push_back(std::move(s));
    }
    std::vector<State> coarse;
    for (size_t k = 0; k < fine.size(); k += 2) coarse.push_back(fine[k]);
    CHECK(separation_gap(fine, 0.0) <= separation_gap(coarse, 0.0) + 1e-15);
}

TEST_CASE("weak distance does not spuriously collapse along trajectory pairs") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    p.B = 0.01;
    CHStepConfig cfg;
    const double tau = 2e-3;
    State a = make_state(g, random_scalar(g, 80, 0.1), ScalarField(g), VectorField(g), p);
    State b = a;
    ScalarField bump = mean_free(random_scalar(g, 81, 1e-3));
    for (size_t k = 0; k < b.phi.size(); ++k) b.phi.data()[k] += bump.data()[k];
    const double w0 = weak_distance(a, b).W;
    REQUIRE(w0 > 0.0);
    double w_min = w0, m_max = 0.0;
    double w_prev = w0;
    for (int n = 1; n <= 50; ++n) {
        a = step(a, tau, p, cfg);
        b = step(b, tau, p, cfg);
        const double w = weak_distance(a, b).W;
        w_min = std::min(w_min, w);
        m_max = std::max(m_max, (std::log(w_prev) - std::log(w)) / tau);
        w_prev = w;
    }
    CHECK(w_min > 1e-12 * w0);       // never collapses to zero
    CHECK(std::isfinite(m_max));     // the measured decay rate stays finite
}

TEST_CASE("smoothing ratio respects the (1+t)/t shape when t doubles") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    p.B = 0.01;
    CHStepConfig cfg;
    cfg.tau = 2e-3;
    State s0 = make_state(g, random_scalar(g, 71, 0.2), ScalarField(g), VectorField(g), p);
    const double r1 = smoothing_ratio(s0, 1e-3, 0.05, p, cfg);
    const double r2 = smoothing_ratio(s0, 1e-3, 0.10, p, cfg);
    CHECK(r2 <= 3.0 * r1);
}

TEST_CASE("smoothing ratio contracts") {
    Grid g(16, 16, 1.0, 1.0);
    PhysParams p;
    p.B = 0.01;
    CHStepConfig cfg;
    cfg.tau = 2e-3;
    ScalarField phi = random_scalar(g, 70, 0.2);
    State s0 = make_state(g, phi, ScalarField(g), VectorField(g), p);
    CHECK_THROWS_AS(smoothing_ratio(s0, 0.0, 0.1, p, cfg), ContractError);
    CHECK_THROWS_AS(smoothing_ratio(s0, 0.1, 0.1, p, cfg), ContractError);
    CHECK_THROWS_AS(smoothing_ratio(s0, 1e-3, 0.0, p, cfg), ContractError);
    const double ratio = smoothing_ratio(s0, 1e-3, 0.05, p, cfg);
    CHECK(std::isfinite(ratio));
    CHECK(ratio > 0.0);
}
