// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "wgstokes/fields.hpp"
#include "wgstokes/mesh.hpp"
#include "wgstokes/polybasis.hpp"

namespace wgstokes {

/// Discontinuous pressure space: orthonormal modal P_{k-1} on every cell.
/// Orthonormality makes the pressure mass matrix the identity, so L2 norms of
/// coefficient differences are L2 norms of functions.
class PressureSpace {
public:
  /// `k` is the velocity degree; the pressure degree is k-1.
  PressureSpace(const SimplicialMesh& mesh, int k);

  const SimplicialMesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int per_cell() const { return per_cell_; }
  std::int64_t total_dofs() const { return static_cast<std::int64_t>(per_cell_) * mesh_->num_cells(); }
  std::int64_t cell_offset(int c) const { return static_cast<std::int64_t>(per_cell_) * c; }
  const ScalarBasis& cell_basis(int c) const { return bases_[c]; }

  /// Cellwise L2 projection of f, as a global coefficient vector.
  Eigen::VectorXd project(const ScalarField& f, int quad_degree) const;
  /// Integral of every basis function: the zero-mean constraint row.
  Eigen::VectorXd mean_row(int quad_degree) const;
  double eval(const Eigen::VectorXd& coeffs, int cell, const Eigen::Vector3d& x) const;

private:
  const SimplicialMesh* mesh_;
  int degree_;
  int per_cell_;
  std::vector<ScalarBasis> bases_;
};

/// H(div)-conforming velocity space: [P_k]^d on every cell with continuous
/// normal component across faces.
///
/// DOFs per face: moments of v·n against an orthonormal P_k(face) basis, the
/// normal being the face's stored owner->neighbor unit normal, so both cells
/// read the same functional and normal continuity is a shared-DOF statement.
/// DOFs per cell: coefficients against an orthonormal basis of the nullspace
/// of the face-moment matrix — a numerically-built complement that avoids
/// per-degree interior moment bookkeeping; any unisolvent completion spans the
/// same space and produces the same discrete solutions.
///
/// Local coefficient layout on a cell: component-major over the cell's
/// orthonormal scalar basis, coefficient index p = comp * n_scalar + i.
/// Local DOF order: the cell's faces in cell_faces order (face-basis index
/// fastest), then the interior DOFs.
class HdivSpace {
public:
  HdivSpace(const SimplicialMesh& mesh, int k, int quad_degree);

  const SimplicialMesh& mesh() const { return *mesh_; }
  int degree() const { return k_; }
  int face_dofs() const { return face_dofs_; }
  int interior_dofs() const { return interior_dofs_; }
  int coeffs_per_cell() const { return n_coeff_; }
  int local_dofs_per_cell() const { return n_coeff_; } // unisolvent: same count
  std::int64_t total_dofs() const { return total_dofs_; }
  std::int64_t face_offset(int f) const { return static_cast<std::int64_t>(face_dofs_) * f; }
  std::int64_t interior_offset(int c) const {
    return interior_base_ + static_cast<std::int64_t>(interior_dofs_) * c;
  }

  const ScalarBasis& face_basis(int f) const { return face_bases_[f]; }
  /// Degree-k scalar basis whose vector copies carry the local coefficients.
  const ScalarBasis& cell_basis(int c) const { return cell_bases_[c]; }
  /// Map local DOF values to local coefficients (inverse local Vandermonde).
  const Eigen::MatrixXd& dof_to_coeff(int c) const { return dof_to_coeff_[c]; }
  /// The local Vandermonde itself: functional values of the coefficient basis.
  const Eigen::MatrixXd& coeff_to_dof(int c) const { return coeff_to_dof_[c]; }
  /// Orthonormal basis of the face-moment nullspace (columns), defining the
  /// interior DOFs: values are N^T * coefficients.
  const Eigen::MatrixXd& interior_complement(int c) const { return interior_null_[c]; }

  /// Global DOF ids in local order (see class comment).
  std::vector<std::int64_t> local_dofs(int c) const;
  /// All DOFs sitting on boundary faces, ascending.
  const std::vector<std::int64_t>& boundary_dofs() const { return boundary_dofs_; }

  /// Local coefficients of a global DOF vector on one cell.
  Eigen::VectorXd local_coeffs(const Eigen::VectorXd& global, int c) const;
  Eigen::Vector3d eval(const Eigen::VectorXd& global, int c, const Eigen::Vector3d& x) const;
  double eval_divergence(const Eigen::VectorXd& global, int c, const Eigen::Vector3d& x) const;

  /// Interpolation of a smooth field: face DOFs are the face moments of v·n;
  /// interior DOFs complete the cell by the constrained best fit that also
  /// matches moments against gradients of P_{k-1}(cell). The gradient-moment
  /// constraint is what makes elementwise divergence moments of the
  /// interpolant match those of v (integrate by parts: the face moments kill
  /// the boundary term, the gradient moments kill the volume term).
  Eigen::VectorXd interpolate(const VectorField& v, int quad_degree) const;

  /// Face moments of g·n on boundary faces only, as (dof id, value) pairs in
  /// boundary_dofs() order — the strong part of an inhomogeneous boundary
  /// condition.
  Eigen::VectorXd boundary_values(const VectorField& g, int quad_degree) const;

private:
  const SimplicialMesh* mesh_;
  int k_;
  int quad_degree_;
  int dim_;
  int n_scalar_;       ///< dim P_k on a cell
  int n_coeff_;        ///< d * n_scalar
  int face_dofs_;      ///< dim P_k on a face
  int interior_dofs_;  ///< n_coeff - (d+1) * face_dofs
  std::int64_t interior_base_;
  std::int64_t total_dofs_;

  std::vector<ScalarBasis> face_bases_;
  std::vector<ScalarBasis> cell_bases_;
  std::vector<Eigen::MatrixXd> dof_to_coeff_;
  std::vector<Eigen::MatrixXd> coeff_to_dof_;
  std::vector<Eigen::MatrixXd> interior_null_;
  std::vector<std::int64_t> boundary_dofs_;
};

} // namespace wgstokes
