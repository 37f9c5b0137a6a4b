// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "wgstokes/fields.hpp"
#include "wgstokes/spaces.hpp"
#include "wgstokes/weak_gradient.hpp"

namespace wgstokes {

struct SolveReport;

/// Data of one Stokes boundary-value problem on the meshed domain.
struct StokesProblem {
  double mu = 1.0;
  VectorField forcing;
  /// Dirichlet velocity data; an empty function means zero. Its normal
  /// moments pin the boundary DOFs; its full trace feeds the weak-gradient
  /// lifting according to the boundary convention.
  VectorField boundary_velocity;
};

struct AssemblyOptions {
  /// Quadrature degree for all assembly integrals; -1 picks 2k+6.
  int quad_degree = -1;
  BoundaryConvention convention{};
};

/// The discrete Stokes saddle system over free velocity DOFs, all pressure
/// DOFs, and one multiplier enforcing the zero-mean pressure:
///
///   [ A   -D^T  0 ] [u]   [F - lift - A_bdry u_g]
///   [-D    0    c ] [p] = [D_bdry u_g           ]
///   [ 0   c^T   0 ] [l]   [0                    ]
///
/// A = sum_T mu G_T^T G_T with G_T the per-cell weak gradient, D the
/// divergence pairing (div v, q), c the pressure means. Boundary velocity
/// DOFs (normal moments of the data) are eliminated into the right side.
/// The multiplier vanishes at the solution whenever the data satisfy the
/// compatibility condition (zero net flux).
class SaddleSystem {
public:
  SaddleSystem(const HdivSpace& velocity, const PressureSpace& pressure,
               const StokesProblem& problem, const AssemblyOptions& options = {});

  std::int64_t n_free() const { return static_cast<std::int64_t>(free_.size()); }
  std::int64_t n_pressure() const { return pressure_->total_dofs(); }
  std::int64_t size() const { return n_free() + n_pressure() + 1; }

  const Eigen::SparseMatrix<double>& matrix() const { return kkt_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }

  /// Viscous block over free DOFs (mu included), divergence block, mean row.
  const Eigen::SparseMatrix<double>& a_block() const { return a_; }
  const Eigen::SparseMatrix<double>& d_block() const { return d_; }
  const Eigen::VectorXd& mean_row() const { return mean_; }
  const std::vector<std::int64_t>& free_dofs() const { return free_; }
  double mu() const { return mu_; }

  /// Solve with "direct" (sparse LU), "penalty" (iterated-penalty Cholesky,
  /// the low-memory choice at fine levels), or "minres"; returns the stacked
  /// vector.
  Eigen::VectorXd solve(const std::string& method, SolveReport& report) const;

  /// Expand the stacked solution: velocity over all space DOFs with the
  /// boundary values filled back in; the pressure coefficients; the
  /// multiplier.
  Eigen::VectorXd full_velocity(const Eigen::VectorXd& x) const;
  Eigen::VectorXd pressure(const Eigen::VectorXd& x) const;
  double multiplier(const Eigen::VectorXd& x) const { return x[size() - 1]; }

private:
  const HdivSpace* velocity_;
  const PressureSpace* pressure_;
  double mu_;
  int quad_degree_;
  std::vector<std::int64_t> free_;      ///< free velocity DOF ids, ascending
  std::vector<std::int64_t> position_;  ///< dof id -> free index, -1 if pinned
  Eigen::VectorXd pinned_values_;       ///< per dof id; zero away from the boundary
  Eigen::SparseMatrix<double> a_, d_, kkt_;
  Eigen::VectorXd mean_, rhs_;
};

} // namespace wgstokes
