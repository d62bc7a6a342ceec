#pragma once

#include <stdexcept>
#include <string>

namespace nsch {

// Shape/precondition violations between fields and grids.
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver failed to reach its tolerance within the iteration cap.
struct SolverError : std::runtime_error {
    double residual;
    SolverError(const std::string& what, double res)
        : std::runtime_error(what + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

// Pure-Neumann problem with incompatible (non-mean-free) right-hand side.
struct IncompatibilityError : std::runtime_error {
    explicit IncompatibilityError(const std::string& what) : std::runtime_error(what) {}
};

// Potential evaluated at |r| >= 1.
struct PotentialDomainError : std::runtime_error {
    explicit PotentialDomainError(const std::string& what) : std::runtime_error(what) {}
};

// Potential evaluated inside the overflow guard band 1 - 1e-14 < |r| < 1.
struct OverflowGuardError : std::runtime_error {
    explicit OverflowGuardError(const std::string& what) : std::runtime_error(what) {}
};

// A time step could not be completed; carries the last nonlinear residual.
struct StepError : std::runtime_error {
    double last_residual;
    StepError(const std::string& what, double res)
        : std::runtime_error(what + " (last residual " + std::to_string(res) + ")"),
          last_residual(res) {}
};

// Newton iterates kept hitting the barrier clip; the time step is too large.
struct BarrierFailureError : std::runtime_error {
    explicit BarrierFailureError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration file parse or validation failure.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Snapshot / ledger I/O failure.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nsch
