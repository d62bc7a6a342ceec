#pragma once

#include <string>

#include "nsch/grid.hpp"

namespace nsch {

/// Model constants. Defaults satisfy every hypothesis and exercise all
/// coupling terms.
struct PhysParams {
    double A = 1.0;       // surface tension coefficient, > 0
    double B = 1.0;       // interface thickness coefficient, > 0
    double chi = 0.5;     // chemotaxis / active transport coupling
    double alpha = 0.5;   // Oono reaction rate, >= 0
    double c0 = 0.0;      // Oono target mean, in (-1,1) and [-m1, m1]
    double theta = 1.0;   // potential temperature, 0 < theta < theta0
    double theta0 = 2.0;
    double eta1 = 1.0;    // pure-phase viscosities, > 0
    double eta2 = 2.0;
    double m1 = 0.5;      // phase-space mean bound for phi, in [0,1)
    double m2 = 10.0;     // phase-space mean bound for sigma, >= 0

    double eta_min() const { return eta1 < eta2 ? eta1 : eta2; }
    double eta_max() const { return eta1 > eta2 ? eta1 : eta2; }

    /// Throws ConfigError naming the violated hypothesis or phase-space
    /// constraint.
    void validate() const;
};

/// Logarithmic potential evaluated at one point. `second` is the full
/// Psi''(r); the convex part satisfies Psi0'' = second + theta0 >= theta.
/// `third` is Psi0''' (the concave part is quadratic, so Psi''' = Psi0''').
struct PotentialEval {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
    double third = 0.0;
};

struct HypothesisReport {
    bool h1_ok = false;
    bool h2_ok = false;
    bool h3_ok = false;
    bool h4_ok = false;
    double eta_star = 0.0;        // measured min of eta on [-1,1]
    double eta_star_upper = 0.0;  // measured max of eta on [-1,1]
    double worst_h3_margin = 0.0; // log-space slack of the fitted (H3) bound
    double h3_fit_c = 0.0;        // best-fit constant C of (H3)
};

/// Flory-Huggins potential and derivatives at r, |r| < 1.
PotentialEval psi(double r, const PhysParams& p);

/// Convex-part derivative Psi0'(r) = (theta/2) ln((1+r)/(1-r)).
double psi0_prime(double r, const PhysParams& p);

/// Concentration-dependent viscosity; input clamped to [-1,1].
double eta(double r, const PhysParams& p);

/// mu = A Psi'(phi) - B Lap_N(phi) - chi sigma. Requires |phi| < 1 pointwise.
ScalarField chemical_potential(const ScalarField& phi, const ScalarField& sigma,
                               const PhysParams& p);

/// Sampled verification of (H1)-(H4) on a Chebyshev-clustered grid in (-1,1).
/// Failures are reported, never thrown. eps0 for the (H2) monotonicity window
/// defaults to 0.1.
HypothesisReport verify_hypotheses(const PhysParams& p, int n_samples, double eps0 = 0.1);

}  // namespace nsch
