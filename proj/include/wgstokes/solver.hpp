// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <string>

namespace wgstokes {

struct SolveReport {
  std::string method;
  int iterations = 0;            ///< 0 for direct factorizations
  double relative_residual = 0;  ///< true residual ||b - Kx|| / ||b||, recomputed
};

/// Sparse LU with column reordering. Throws SolverError if the factorization
/// fails; the report carries the verified residual.
Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& rhs,
                                SolveReport& report);

/// Preconditioned MINRES for symmetric (possibly indefinite) systems.
/// `inv_precond_diag` is the inverse of a positive diagonal preconditioner.
/// Iterates until the preconditioned residual drops below tol relative to the
/// initial one, then verifies the true residual. Throws SolverError if the
/// iteration stalls out.
Eigen::VectorXd minres_solve(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& rhs,
                             const Eigen::VectorXd& inv_precond_diag, double tol,
                             int max_iterations, SolveReport& report);

} // namespace wgstokes
