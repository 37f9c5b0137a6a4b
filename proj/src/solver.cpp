// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#ifdef WGS_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "wgstokes/errors.hpp"

namespace wgstokes {

namespace {

double true_relative_residual(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& rhs,
                              const Eigen::VectorXd& x) {
  const double denom = std::max(rhs.norm(), std::numeric_limits<double>::min());
  return (rhs - k * x).norm() / denom;
}

} // namespace

Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& rhs,
                                SolveReport& report) {
  if (k.rows() != k.cols()) {
    throw SolverError("direct solve requires a square matrix");
  }
  if (rhs.size() != k.rows()) {
    throw SolverError("right-hand side length does not match the matrix");
  }

  Eigen::SparseMatrix<double> kc = k;
  kc.makeCompressed();

#ifdef WGS_HAVE_UMFPACK
  // UMFPACK's multifrontal elimination with threshold pivoting handles the
  // indefinite saddle matrix with far less fill than Eigen's supernodal LU.
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(kc);
  if (lu.info() != Eigen::Success) {
    throw SolverError("sparse LU factorization failed");
  }
#else
  // The saddle matrix has a structurally symmetric pattern; AMD keeps the
  // fill-in below what COLAMD produces on the bordered KKT block layout.
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::AMDOrdering<int>> lu;
  lu.compute(kc);
  if (lu.info() != Eigen::Success) {
    throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage());
  }
#endif

  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) {
    throw SolverError("sparse LU back substitution failed");
  }

  report.method = "direct";
  report.iterations = 0;
  report.relative_residual = true_relative_residual(k, rhs, x);
  return x;
}

Eigen::VectorXd minres_solve(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& rhs,
                             const Eigen::VectorXd& inv_precond_diag, double tol,
                             int max_iterations, SolveReport& report) {
  if (k.rows() != k.cols()) {
    throw SolverError("minres requires a square matrix");
  }
  const Eigen::Index n = k.rows();
  if (rhs.size() != n || inv_precond_diag.size() != n) {
    throw SolverError("minres operand sizes do not match the matrix");
  }
  if ((inv_precond_diag.array() <= 0.0).any()) {
    throw SolverError("minres preconditioner must be positive");
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  report.method = "minres";

  // Lanczos process with the preconditioner applied symmetrically; this is the
  // classic Paige-Saunders recurrence, tracking only the quantities needed to
  // update the iterate and the preconditioned residual norm phibar.
  Eigen::VectorXd r1 = rhs;
  Eigen::VectorXd y = inv_precond_diag.cwiseProduct(r1);
  const double beta1_sq = r1.dot(y);
  if (beta1_sq < 0.0) {
    throw SolverError("minres preconditioner is not positive definite");
  }
  const double beta1 = std::sqrt(beta1_sq);
  if (beta1 == 0.0) {
    report.iterations = 0;
    report.relative_residual = 0.0;
    return x; // zero right-hand side: zero solution
  }

  Eigen::VectorXd r2 = r1;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w1 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w2 = Eigen::VectorXd::Zero(n);

  double oldb = 0.0;
  double beta = beta1;
  double dbar = 0.0;
  double epsln = 0.0;
  double phibar = beta1;
  double cs = -1.0;
  double sn = 0.0;

  int itn = 0;
  bool converged = false;
  while (itn < max_iterations) {
    ++itn;

    Eigen::VectorXd v = y / beta;
    y = k * v;
    if (itn >= 2) {
      y -= (beta / oldb) * r1;
    }
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    y = inv_precond_diag.cwiseProduct(r2);
    oldb = beta;
    const double beta_sq = r2.dot(y);
    if (beta_sq < 0.0) {
      throw SolverError("minres preconditioner is not positive definite");
    }
    beta = std::sqrt(beta_sq);

    // Apply the previous rotation and compute the next one.
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma =
        std::max(std::sqrt(gbar * gbar + beta * beta), std::numeric_limits<double>::epsilon());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;

    if (phibar <= tol * beta1) {
      converged = true;
      break;
    }
  }

  report.iterations = itn;
  report.relative_residual = true_relative_residual(k, rhs, x);
  if (!converged && report.relative_residual > tol * 100) {
    throw SolverError("minres did not converge in " + std::to_string(max_iterations) +
                      " iterations (relative residual " +
                      std::to_string(report.relative_residual) + ")");
  }
  return x;
}

} // namespace wgstokes
