#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nsch/ch_solver.hpp"
#include "nsch/grid.hpp"
#include "nsch/physics.hpp"

namespace nsch {

/// Run configuration: `key = value` lines, `#` comments. Validated against
/// the model hypotheses and the phase-space constraints at load; rejection
/// messages name the violated constraint.
struct RunConfig {
    Grid grid{64, 64, 1.0, 1.0};
    PhysParams params;
    double tau = 1e-3;
    double t_end = 1.0;
    int snapshot_every = 0;  // steps; 0 disables snapshots
    int ledger_every = 1;    // steps between ledger rows
    std::string init = "quiescent";  // quiescent | spinodal | bubble
    unsigned long seed = 1;
    double noise_amp = 0.05;
    double sigma0 = 0.0;     // constant initial nutrient; defaults to m2/2
    bool sigma0_set = false;
    double phi0_mean = 0.0;  // defaults to c0
    bool phi0_mean_set = false;
    std::vector<std::string> diagnostics;  // empty = all audits enabled
    std::string output_dir = "out";
    CHStepConfig ch;

    double sigma0_value() const { return sigma0_set ? sigma0 : 0.5 * params.m2; }
    double phi0_mean_value() const { return phi0_mean_set ? phi0_mean : params.c0; }
    bool diagnostic_enabled(const std::string& name) const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& in, const std::string& name);

}  // namespace nsch
