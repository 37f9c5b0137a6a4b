// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/postproc.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "wgstokes/errors.hpp"
#include "wgstokes/quadrature.hpp"

namespace wgstokes {

namespace {

double cell_divergence_max(const ScalarBasis& basis, const Eigen::VectorXd& local_coeffs,
                           const MappedRule& rule, int dim) {
  const int ns = basis.size();
  double worst = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const Eigen::MatrixXd grads = basis.eval_grad(rule.points.col(q)); // ns x 3
    double div = 0.0;
    for (int comp = 0; comp < dim; ++comp) {
      div += local_coeffs.segment(static_cast<Eigen::Index>(comp) * ns, ns).dot(grads.col(comp));
    }
    worst = std::max(worst, std::abs(div));
  }
  return worst;
}

} // namespace

HdivErrors measure_errors(const HdivSpace& velocity, const PressureSpace& pressure,
                          const Eigen::VectorXd& velocity_dofs,
                          const Eigen::VectorXd& pressure_coeffs,
                          const VectorField& exact_velocity,
                          const MatrixField& exact_velocity_gradient,
                          const ScalarField& exact_pressure,
                          const VectorField& boundary_velocity, int quad_degree,
                          BoundaryConvention convention) {
  const SimplicialMesh& mesh = velocity.mesh();
  if (&pressure.mesh() != &mesh) {
    throw ConfigError("velocity and pressure spaces live on different meshes");
  }
  if (velocity_dofs.size() != velocity.total_dofs()) {
    throw ConfigError("velocity DOF vector has the wrong length");
  }
  if (pressure_coeffs.size() != pressure.total_dofs()) {
    throw ConfigError("pressure coefficient vector has the wrong length");
  }
  if (!exact_velocity || !exact_velocity_gradient || !exact_pressure) {
    throw ConfigError("error measurement needs the exact velocity, gradient and pressure");
  }

  const int dim = mesh.dim;
  const QuadRule ref = simplex_rule(dim, quad_degree);

  double vel2 = 0.0;
  double energy2 = 0.0;
  double press2 = 0.0;
  double div_sup = 0.0;

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const MappedRule rule = map_rule(ref, mesh.cell_vertex_matrix(c));
    const int npts = rule.size();

    const ScalarBasis& cb = velocity.cell_basis(c);
    const int ns = cb.size();
    const Eigen::VectorXd uc = velocity.local_coeffs(velocity_dofs, c);
    const Eigen::MatrixXd phi = cb.eval_many(rule.points); // ns x npts

    const ScalarBasis& pb = pressure.cell_basis(c);
    const Eigen::VectorXd pc =
        pressure_coeffs.segment(pressure.cell_offset(c), pressure.per_cell());
    const Eigen::MatrixXd psi = pb.eval_many(rule.points); // per_cell x npts

    for (int q = 0; q < npts; ++q) {
      const Eigen::Vector3d x = rule.points.col(q);
      const Eigen::Vector3d ue = exact_velocity(x);
      double diff2 = 0.0;
      for (int comp = 0; comp < dim; ++comp) {
        const double uh =
            uc.segment(static_cast<Eigen::Index>(comp) * ns, ns).dot(phi.col(q));
        const double d = uh - ue[comp];
        diff2 += d * d;
      }
      vel2 += rule.weights[q] * diff2;

      const double pd = pc.dot(psi.col(q)) - exact_pressure(x);
      press2 += rule.weights[q] * pd * pd;
    }

    div_sup = std::max(div_sup, cell_divergence_max(cb, uc, rule, dim));

    // Energy: weak gradient of the discrete field (plus the boundary-data
    // lifting, which is what the trial functions actually carry) against the
    // projected exact gradient, both as coefficients of the same orthonormal
    // tensor basis.
    const WeakGradient wg(velocity, c, quad_degree, convention);
    Eigen::VectorXd grad_h = wg.apply(velocity_dofs);
    if (boundary_velocity) {
      grad_h += wg.lift(boundary_velocity, quad_degree);
    }

    const ScalarBasis& tb = wg.tensor_scalar_basis();
    const int nm = tb.size();
    const Eigen::MatrixXd tphi = tb.eval_many(rule.points); // nm x npts
    Eigen::MatrixXd gvals(dim * dim, npts);
    for (int q = 0; q < npts; ++q) {
      const Eigen::Matrix3d g = exact_velocity_gradient(rule.points.col(q));
      for (int r = 0; r < dim; ++r) {
        for (int s = 0; s < dim; ++s) {
          gvals(r * dim + s, q) = g(r, s);
        }
      }
    }
    // proj(m, rs) = sum_q w_q * tphi(m, q) * gvals(rs, q): exact L2-projection
    // coefficients because the basis is orthonormal.
    const Eigen::MatrixXd proj = tphi * rule.weights.asDiagonal() * gvals.transpose();
    Eigen::VectorXd grad_exact(static_cast<Eigen::Index>(dim) * dim * nm);
    for (int rs = 0; rs < dim * dim; ++rs) {
      grad_exact.segment(static_cast<Eigen::Index>(rs) * nm, nm) = proj.col(rs);
    }
    energy2 += (grad_exact - grad_h).squaredNorm();
  }

  HdivErrors out;
  out.velocity_l2 = std::sqrt(vel2);
  out.energy = std::sqrt(energy2);
  out.pressure_l2 = std::sqrt(press2);
  out.divergence_sup = div_sup;
  return out;
}

double divergence_sup(const HdivSpace& velocity, const Eigen::VectorXd& velocity_dofs,
                      int quad_degree) {
  if (velocity_dofs.size() != velocity.total_dofs()) {
    throw ConfigError("velocity DOF vector has the wrong length");
  }
  const SimplicialMesh& mesh = velocity.mesh();
  const QuadRule ref = simplex_rule(mesh.dim, quad_degree);
  double worst = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const MappedRule rule = map_rule(ref, mesh.cell_vertex_matrix(c));
    const Eigen::VectorXd uc = velocity.local_coeffs(velocity_dofs, c);
    worst = std::max(worst, cell_divergence_max(velocity.cell_basis(c), uc, rule, mesh.dim));
  }
  return worst;
}

double infsup_estimate(const SaddleSystem& system) {
  const Eigen::SparseMatrix<double>& a = system.a_block();
  const Eigen::SparseMatrix<double>& d = system.d_block();
  const Eigen::VectorXd& mean = system.mean_row();
  const Eigen::Index nf = a.rows();
  const Eigen::Index np = d.rows();
  if (np < 2) {
    throw ConfigError("inf-sup estimate needs at least two pressure DOFs");
  }
  // Dense in the pressure block and one Cholesky solve per pressure DOF:
  // affordable on coarse meshes, hopeless beyond. Refuse rather than thrash.
  if (nf > 120000 || np > 20000) {
    throw ConfigError("system too large for the dense inf-sup estimate");
  }

  Eigen::SparseMatrix<double> ac = a;
  ac.makeCompressed();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(ac);
  if (chol.info() != Eigen::Success) {
    throw NumericError("velocity energy matrix is not positive definite");
  }

  // S = mu * D A^{-1} D^T. The assembled A carries the viscosity, so the mu
  // factor strips it again and the estimate is viscosity-independent.
  Eigen::MatrixXd s(np, np);
  const Eigen::Index chunk = 256;
  for (Eigen::Index j0 = 0; j0 < np; j0 += chunk) {
    const Eigen::Index b = std::min(chunk, np - j0);
    const Eigen::MatrixXd rhs =
        Eigen::MatrixXd(Eigen::SparseMatrix<double>(d.middleRows(j0, b))).transpose();
    const Eigen::MatrixXd x = chol.solve(rhs);
    s.middleCols(j0, b) = system.mu() * (d * x);
  }

  // Restrict to zero-mean pressures: the trailing columns of a Householder Q
  // whose leading column is the mean row direction.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(mean);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd z = q.rightCols(np - 1);
  const Eigen::MatrixXd zsz = z.transpose() * s * z;
  const Eigen::MatrixXd restricted = 0.5 * (zsz + zsz.transpose());

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(restricted, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericError("inf-sup eigenvalue solve failed");
  }
  return std::sqrt(std::max(es.eigenvalues().minCoeff(), 0.0));
}

} // namespace wgstokes
