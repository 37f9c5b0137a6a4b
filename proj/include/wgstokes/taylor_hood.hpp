// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <string>
#include <vector>

#include "wgstokes/assembly.hpp"
#include "wgstokes/fields.hpp"
#include "wgstokes/lagrange.hpp"
#include "wgstokes/mesh.hpp"
#include "wgstokes/solver.hpp"

namespace wgstokes {

/// Classical conforming mixed discretization on triangles: continuous vector
/// P_k velocity with continuous P_{k-1} pressure — the standard comparison
/// point for pressure robustness. Velocity Dirichlet values are pinned at
/// boundary nodes; the zero-mean pressure constraint is a bordering row, so
/// the linear system has the same saddle shape as the H(div) scheme and
/// reuses the same solvers.
class TaylorHoodSystem {
public:
  /// 2D meshes only; k = 2 or 3. `quad_degree` < 0 picks a rule exact for
  /// every assembled polynomial integrand with headroom for the forcing.
  TaylorHoodSystem(const SimplicialMesh& mesh, int k, const StokesProblem& problem,
                   int quad_degree = -1);

  const LagrangeSpace& velocity_space() const { return vspace_; }
  const LagrangeSpace& pressure_space() const { return pspace_; }

  std::int64_t n_free() const { return static_cast<std::int64_t>(free_.size()); }
  std::int64_t n_pressure() const { return pspace_.num_nodes(); }
  std::int64_t size() const { return n_free() + n_pressure() + 1; }
  const Eigen::SparseMatrix<double>& matrix() const { return kkt_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }

  /// method: "direct" (sparse LU) or "minres".
  Eigen::VectorXd solve(const std::string& method, SolveReport& report) const;

  /// Nodal velocity values from a solution vector, component-major
  /// (index = comp * num_nodes + node), boundary nodes carrying their data.
  Eigen::VectorXd full_velocity(const Eigen::VectorXd& x) const;
  /// Nodal pressure values from a solution vector.
  Eigen::VectorXd pressure(const Eigen::VectorXd& x) const;
  double multiplier(const Eigen::VectorXd& x) const { return x[size() - 1]; }

  struct Errors {
    double velocity_l2 = 0.0;
    double gradient = 0.0; ///< || grad u - grad u_h ||, no viscosity factor
    double pressure_l2 = 0.0;
  };
  Errors measure_errors(const Eigen::VectorXd& velocity_nodes,
                        const Eigen::VectorXd& pressure_nodes,
                        const VectorField& exact_velocity,
                        const MatrixField& exact_velocity_gradient,
                        const ScalarField& exact_pressure, int quad_degree) const;

private:
  const SimplicialMesh* mesh_;
  LagrangeSpace vspace_;
  LagrangeSpace pspace_;
  double mu_;
  int quad_degree_;
  std::vector<std::int64_t> free_;     ///< free velocity DOFs, ascending
  std::vector<std::int64_t> position_; ///< velocity DOF -> free index, -1 pinned
  Eigen::VectorXd pinned_values_;      ///< full-length, zero on free entries
  Eigen::SparseMatrix<double> kkt_;
  Eigen::VectorXd rhs_;
};

} // namespace wgstokes
