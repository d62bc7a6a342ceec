#include <doctest.h>

#include <cmath>

#include "nsch/operators.hpp"
#include "nsch/physics.hpp"
#include "test_helpers.hpp"

using namespace nsch;
using namespace nsch::testing;

namespace {

// Extended-precision reference for the potential derivatives.
long double psi_prime_ld(long double r, long double th, long double th0) {
    return 0.5L * th * std::log((1.0L + r) / (1.0L - r)) - th0 * r;
}
long double psi_ld(long double r, long double th, long double th0) {
    return 0.5L * th * ((1.0L - r) * std::log(1.0L - r) + (1.0L + r) * std::log(1.0L + r)) +
           0.5L * th0 * (1.0L - r * r);
}

}  // namespace

TEST_CASE("potential at the origin") {
    PhysParams p;  // theta=1, theta0=2
    PotentialEval e = psi(0.0, p);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-15));  // theta0/2
    CHECK(e.first == 0.0);
    CHECK(e.second + p.theta0 == doctest::Approx(p.theta).epsilon(1e-15));  // Psi0'' = theta
    CHECK(e.third == 0.0);
}

TEST_CASE("potential near the pure phase against the extended-precision oracle") {
    PhysParams p;
    PotentialEval e = psi(0.9, p);
    CHECK(e.first == doctest::Approx(0.5 * std::log(19.0) - 1.8).epsilon(1e-14));
    CHECK(static_cast<long double>(e.first) ==
          doctest::Approx(static_cast<double>(psi_prime_ld(0.9L, 1.0L, 2.0L))).epsilon(1e-14));
    CHECK(static_cast<double>(psi_ld(0.9L, 1.0L, 2.0L)) ==
          doctest::Approx(e.value).epsilon(1e-14));
}

TEST_CASE("potential domain guards") {
    PhysParams p;
    CHECK_THROWS_AS(psi(1.0, p), PotentialDomainError);
    CHECK_THROWS_AS(psi(-1.2, p), PotentialDomainError);
    CHECK_THROWS_AS(psi(1.0 - 5e-15, p), OverflowGuardError);
    CHECK_NOTHROW(psi(1.0 - 1e-13, p));
}

TEST_CASE("potential symmetry and derivative consistency") {
    PhysParams p;
    p.theta = 0.7;
    p.theta0 = 1.9;
    for (double r : {0.05, 0.3, 0.62, 0.9, 0.985}) {
        PotentialEval plus = psi(r, p), minus = psi(-r, p);
        CHECK(plus.value == doctest::Approx(minus.value).epsilon(1e-14));
        CHECK(plus.first == doctest::Approx(-minus.first).epsilon(1e-14));
        // centered finite difference approximates Psi' at O(h^2)
        const double h = 1e-5;
        const double fd = (psi(r + h, p).value - psi(r - h, p).value) / (2.0 * h);
        CHECK(fd == doctest::Approx(plus.first).epsilon(1e-7));
        // Psi0'' = second + theta0 stays above theta
        CHECK(plus.second + p.theta0 >= p.theta);
    }
}

TEST_CASE("viscosity endpoints, midpoint, clamp") {
    PhysParams p;
    p.eta1 = 1.0;
    p.eta2 = 2.0;
    CHECK(eta(1.0, p) == doctest::Approx(1.0));
    CHECK(eta(-1.0, p) == doctest::Approx(2.0));
    CHECK(eta(0.0, p) == doctest::Approx(1.5));
    CHECK(eta(1.3, p) == doctest::Approx(1.0));   // clamped
    CHECK(eta(-7.0, p) == doctest::Approx(2.0));  // clamped
}

TEST_CASE("chemical potential") {
    Grid g(24, 24, 1.0, 1.0);
    PhysParams p;

    SUBCASE("zero state gives zero") {
        ScalarField z(g);
        CHECK(max_abs(chemical_potential(z, z, p)) == 0.0);
    }
    SUBCASE("constant phi with chi = 0 gives A Psi'(c)") {
        PhysParams q = p;
        q.chi = 0.0;
        ScalarField phi(g), sigma(g);
        phi.fill(0.3);
        ScalarField mu = chemical_potential(phi, sigma, q);
        const double expect = q.A * psi(0.3, q).first;
        for (size_t k = 0; k < mu.size(); ++k)
            CHECK(mu.data()[k] == doctest::Approx(expect).epsilon(1e-13));
    }
    SUBCASE("mean identity: the B Lap phi term integrates to zero") {
        ScalarField phi = random_scalar(g, 3, 0.6);
        ScalarField sigma = random_scalar(g, 4, 2.0);
        ScalarField mu = chemical_potential(phi, sigma, p);
        double expect = 0.0;
        for (size_t k = 0; k < phi.size(); ++k)
            expect += p.A * psi(phi.data()[k], p).first - p.chi * sigma.data()[k];
        expect *= g.cell_area();
        CHECK(std::abs(cell_sum(mu) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
    }
    SUBCASE("linear in sigma with coefficient -chi") {
        ScalarField phi = random_scalar(g, 5, 0.5);
        ScalarField s1 = random_scalar(g, 6, 1.0);
        ScalarField s2 = random_scalar(g, 7, 1.0);
        ScalarField mu1 = chemical_potential(phi, s1, p);
        ScalarField mu2 = chemical_potential(phi, s2, p);
        for (size_t k = 0; k < phi.size(); ++k) {
            const double lhs = mu1.data()[k] - mu2.data()[k];
            const double rhs = -p.chi * (s1.data()[k] - s2.data()[k]);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
    SUBCASE("domain error propagates") {
        ScalarField phi(g), sigma(g);
        phi.fill(0.0);
        phi(3, 3) = 1.0;
        CHECK_THROWS_AS(chemical_potential(phi, sigma, p), PotentialDomainError);
    }
}

TEST_CASE("hypothesis verification") {
    SUBCASE("defaults satisfy everything") {
        PhysParams p;
        HypothesisReport r = verify_hypotheses(p, 1000);
        CHECK(r.h1_ok);
        CHECK(r.h2_ok);
        CHECK(r.h3_ok);
        CHECK(r.h4_ok);
        CHECK(r.eta_star == doctest::Approx(1.0));
        CHECK(r.eta_star_upper == doctest::Approx(2.0));
        CHECK(r.h3_fit_c > 0.0);
        CHECK(r.worst_h3_margin >= -1e-6);
    }
    SUBCASE("inverted temperatures break (H2)") {
        PhysParams p;
        p.theta = 2.0;
        p.theta0 = 1.0;
        HypothesisReport r = verify_hypotheses(p, 500);
        CHECK_FALSE(r.h2_ok);
    }
    SUBCASE("negative Oono rate breaks (H4)") {
        PhysParams p;
        p.alpha = -1.0;
        HypothesisReport r = verify_hypotheses(p, 500);
        CHECK_FALSE(r.h4_ok);
    }
    SUBCASE("sampling density is enforced") {
        PhysParams p;
        CHECK_THROWS_AS(verify_hypotheses(p, 50), ContractError);
    }
}

TEST_CASE("parameter validation names the violated hypothesis") {
    PhysParams p;
    p.alpha = -1.0;
    try {
        p.validate();
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("H4") != std::string::npos);
    }
    PhysParams q;
    q.c0 = 0.9;
    q.m1 = 0.5;
    try {
        q.validate();
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("phase space") != std::string::npos);
    }
}
