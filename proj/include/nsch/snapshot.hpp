#pragma once

#include <string>

#include "nsch/stepper.hpp"

namespace nsch {

/// Binary state snapshot. Header: magic "NSCH", u32 format version, u32 nx,
/// u32 ny, f64 hx, hy, t; payload: phi, sigma, p cell arrays then u, w face
/// arrays, row-major, 64-bit little-endian. Round trips are bit-exact.
/// mu is derived and not stored; use refresh_mu after reading.
void write_snapshot(const State& s, const std::string& path);

/// Reads a snapshot; if `expected` is given, the stored grid must match.
State read_snapshot(const std::string& path, const Grid* expected = nullptr);

/// Recomputes the derived chemical potential of a loaded state.
void refresh_mu(State& s, const PhysParams& p);

}  // namespace nsch
