// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace wgstokes {

/// Rejected user-facing configuration: degree out of the supported range,
/// refinement level too deep, unknown benchmark name, and the like.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A mesh or DOF-map invariant failed: non-conforming facets, inverted cells,
/// inconsistent adjacency. Indicates a broken input, not a numerical accident.
struct StructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown on otherwise valid input: degenerate element geometry,
/// a local basis that lost orthogonality, an unusable local Vandermonde matrix.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A linear solve finished without reaching its residual target.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem output failure when writing tables, fields or mesh dumps.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace wgstokes
