#pragma once

#include <array>
#include <span>

#include "nsch/stepper.hpp"

namespace nsch {

/// Phase-space metric ||v1-v2|| + ||phi1-phi2||_H1 + ||sigma1-sigma2||.
struct PhaseDistance {
    double d = 0.0;
};

/// Weak (dual-norm) distance of the continuous-dependence estimate:
/// components are (velocity, phi, sigma, mean) terms and W is their sum.
struct WeakDistance {
    double W = 0.0;
    std::array<double, 4> components{};
};

/// Exponential fit dist(t) ~ J exp(-omega t) over censored distances.
struct AttractionFit {
    double J = 0.0;
    double omega = 0.0;
    double rms_log_residual = 0.0;
};

PhaseDistance phase_distance(const State& s1, const State& s2);

WeakDistance weak_distance(const State& s1, const State& s2);

/// Single-trajectory integrand of the continuous-dependence functional:
/// ||grad v||^2 + ||phi||_{W^{2,3}}^2 + ||phi||_{H^2}^4 + ||Psi'(phi)||_{L1}
/// + ||sigma||_{H^1}^2 + 1. Pair sums are assembled by the caller.
double z_integrand(const State& s, const PhysParams& p);

/// min over t >= t_min of (1 - ||phi(t)||_inf); requires the trajectory to
/// reach t_min.
double separation_gap(std::span<const State> trajectory, double t_min);

/// max over a in A of min over b in B of phase_distance(a, b).
double hausdorff_semidist(std::span<const State> set_a, std::span<const State> set_b);

/// Least-squares line on (t, ln dist) over entries with dist > 1e-13.
AttractionFit fit_exponential_attraction(std::span<const double> times,
                                         std::span<const double> dists);

/// Integrates the coupled system from s0 and from a perturbed copy (mean-free
/// smooth bump on phi scaled to the requested initial phase distance, then
/// re-separated) to time t and returns
///   (||dv||_H1 + ||dphi||_H2 + ||dsigma||_H1) / initial phase distance.
double smoothing_ratio(const State& s0, double perturbation_size, double t,
                       const PhysParams& p, const CHStepConfig& cfg);

// Discrete norms shared with the smoothing/continuity checks.
double h1_norm_vec(const VectorField& v);   // (||v||^2 + ||grad v||^2)^(1/2)
double h2_norm(const ScalarField& f);       // with Frobenius Hessian seminorm
double h1_norm(const ScalarField& f);
double w23_norm(const ScalarField& f);      // discrete W^{2,3} norm

}  // namespace nsch
