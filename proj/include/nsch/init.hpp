#pragma once

#include "nsch/config.hpp"
#include "nsch/stepper.hpp"

namespace nsch {

/// Builds the initial state from the configured generator:
///   quiescent  phi = phi0_mean everywhere,
///   spinodal   seeded uniform noise of amplitude noise_amp about phi0_mean,
///              mean pinned exactly,
///   bubble     tanh profile with interface width sqrt(B/A).
/// sigma starts at the constant sigma0, v at rest, p at zero; mu is derived.
/// Phase-space membership is checked before returning.
State make_initial_state(const RunConfig& cfg);

}  // namespace nsch
