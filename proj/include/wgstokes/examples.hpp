// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wgstokes/fields.hpp"

namespace wgstokes {

/// A manufactured Stokes solution on the unit square or cube. The forcing
/// splits into the viscous part and the pressure gradient so callers can
/// rescale the viscosity without re-deriving anything:
///   f = mu * neg_laplacian_u + pressure_gradient.
struct ManufacturedCase {
  int id = 0;
  int dim = 2;
  VectorField velocity;
  MatrixField velocity_gradient; ///< G(i,j) = d u_i / d x_j
  ScalarField pressure;          ///< normalized to zero mean on the domain
  VectorField neg_laplacian_u;
  VectorField pressure_gradient;
  bool homogeneous_boundary = true; ///< velocity vanishes on the whole boundary

  VectorField forcing(double mu) const {
    auto lap = neg_laplacian_u;
    auto pg = pressure_gradient;
    return [mu, lap, pg](const Eigen::Vector3d& x) -> Eigen::Vector3d {
      return mu * lap(x) + pg(x);
    };
  }
};

/// The built-in catalog:
///  1 - 2D, polynomial vortex velocity with zero boundary trace, degree-7
///      components; exercises full convergence orders.
///  2 - 2D, zero velocity with a gradient forcing; the discrete velocity of a
///      pressure-robust method vanishes identically for every viscosity.
///  3 - 3D, quadratic velocity (y^2, z^2, x^2) with inhomogeneous boundary
///      data and pressure yz - 1/4.
ManufacturedCase example_case(int id);

} // namespace wgstokes
