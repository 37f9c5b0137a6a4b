// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "wgstokes/assembly.hpp"
#include "wgstokes/fields.hpp"
#include "wgstokes/spaces.hpp"
#include "wgstokes/weak_gradient.hpp"

namespace wgstokes {

/// Error measures of a discrete Stokes solution against a smooth reference.
struct HdivErrors {
  double velocity_l2 = 0.0;    ///< || u - u_h ||
  double energy = 0.0;         ///< broken weak-gradient norm, see measure_errors
  double pressure_l2 = 0.0;    ///< || p - p_h ||
  double divergence_sup = 0.0; ///< max |div u_h| over the sample points
};

/// Compare a discrete solution with a smooth reference on every cell.
///
/// The energy error on a cell is the L2 distance between the (lifted) weak
/// gradient of u_h and the projection of the exact gradient onto the same
/// tensor polynomial space. The projection remainder of a smooth gradient is
/// two orders higher than the discretization error, so this agrees with
/// || grad u - grad_w u_h || to far better than table precision while staying
/// pure coefficient arithmetic.
///
/// `boundary_velocity` may be empty (zero Dirichlet data). `quad_degree` is
/// the sampling rule for all integrals; pick it high enough that the reference
/// fields integrate essentially exactly.
HdivErrors measure_errors(const HdivSpace& velocity, const PressureSpace& pressure,
                          const Eigen::VectorXd& velocity_dofs,
                          const Eigen::VectorXd& pressure_coeffs,
                          const VectorField& exact_velocity,
                          const MatrixField& exact_velocity_gradient,
                          const ScalarField& exact_pressure,
                          const VectorField& boundary_velocity, int quad_degree,
                          BoundaryConvention convention = {});

/// Largest |div u_h| over all cells' quadrature points. The divergence of a
/// discrete field is a polynomial the pressure space tests against, so for a
/// converged solve this is a round-off meter, not an estimate.
double divergence_sup(const HdivSpace& velocity, const Eigen::VectorXd& velocity_dofs,
                      int quad_degree);

/// Discrete inf-sup constant of the assembled saddle system:
///
///   beta = min over zero-mean q of  sqrt( q^T D A^{-1} D^T q / q^T q ),
///
/// with A the (viscosity-stripped) weak-gradient Gram and the pressure basis
/// orthonormal. Dense in the pressure block — meant for coarse meshes only;
/// throws ConfigError when the system is too large to do honestly in memory.
double infsup_estimate(const SaddleSystem& system);

} // namespace wgstokes
