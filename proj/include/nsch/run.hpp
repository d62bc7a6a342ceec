#pragma once

#include <string>
#include <vector>

#include "nsch/config.hpp"
#include "nsch/diagnostics.hpp"
#include "nsch/stepper.hpp"

namespace nsch {

struct RunReport {
    int steps = 0;
    double final_t = 0.0;
    bool audits_passed = true;
    std::vector<std::string> failures;  // one line per failed audit
    std::string ledger_path;
    std::string output_dir;
    // Run-wide audit metrics.
    double max_mass_residual = 0.0;   // vs the geometric Oono identity
    double max_sigma_drift = 0.0;     // |mean sigma - mean sigma0|
    double max_bel_residual = -1e300; // signed max of rho; 0 if no steps ran
    double max_div_residual = 0.0;
    double min_separation_gap = 1.0;  // min over steps of 1 - |phi|_inf
};

/// Resolves cfg.output_dir against the NSCH_OUT_ROOT environment override.
std::string resolve_output_dir(const RunConfig& cfg);

/// Integrates the configured run, writing ledger rows and snapshots at the
/// configured cadence and running the enabled audits. Step errors flush the
/// last valid state to <output_dir>/abort.nsch before rethrowing.
RunReport run(const RunConfig& cfg);

struct AttractReport {
    AttractionFit fit;
    std::vector<double> times;
    std::vector<double> dists;  // ensemble Hausdorff semidistance to the proxy set
};

/// Exponential-attraction proxy: a reference run of the configured setup
/// supplies late-time snapshots (t in [t_end - 1, t_end]) as the candidate
/// attracting set; `ensemble` members start from small seeded perturbations
/// of the configured initial state (a bounded phase-space neighborhood) and
/// the ensemble's Hausdorff semidistance to that set is fitted against
/// J exp(-omega t), with samples before 0.2 t_end left to the prefactor.
AttractReport attract_run(const RunConfig& cfg, int ensemble);

}  // namespace nsch
