// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "wgstokes/fields.hpp"

namespace wgstokes {

/// L2-orthonormal polynomial basis on one physical simplex — a cell, or a face
/// seen in its own tangent plane. Everything downstream (DOFs, weak gradients,
/// projections, error norms) works in coefficients of these bases, which turns
/// L2 inner products into plain dot products.
///
/// Construction: monomials in centroid-centered, diameter-scaled tangent
/// coordinates, orthonormalized against the exact L2 inner product of the
/// simplex (a quadrature rule of twice the degree makes the Gram matrix
/// exact). The orthonormalization is a Householder QR of the weight-scaled
/// evaluation matrix with a positive-diagonal convention — deterministic, and
/// numerically safer than sequential Gram–Schmidt at degree 5 on skewed cells.
///
/// Immutable after construction; concurrent reads are safe.
class ScalarBasis {
public:
  /// Basis of P_degree on the simplex spanned by the columns of `vertices`
  /// (simplex dimension = columns - 1; the ambient dimension may be larger,
  /// e.g. a triangular face of a tet). `entity` labels error messages.
  ScalarBasis(const Eigen::Matrix3Xd& vertices, int degree, std::string entity = {});

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exps_.size()); }
  int simplex_dim() const { return sdim_; }
  const Eigen::Matrix3Xd& vertices() const { return verts_; }

  /// Values of all basis functions at one ambient point.
  Eigen::VectorXd eval(const Eigen::Vector3d& x) const;
  /// Values at many points: size() x n_points.
  Eigen::MatrixXd eval_many(const Eigen::Matrix3Xd& pts) const;
  /// Ambient-space gradients at one point, size() x 3. For a face basis these
  /// are tangential (the function is only defined on the face's plane).
  Eigen::MatrixXd eval_grad(const Eigen::Vector3d& x) const;

  /// Coefficients of the L2(simplex) projection of f. Exact when f is a
  /// polynomial with degree() + deg f <= quad_degree.
  Eigen::VectorXd project(const ScalarField& f, int quad_degree) const;

  /// Gram matrix recomputed with an independent rule; tests audit ~= identity.
  Eigen::MatrixXd gram(int quad_degree) const;

private:
  Eigen::VectorXd monomials_at(const Eigen::Vector3d& x) const;

  Eigen::Matrix3Xd verts_;
  Eigen::Vector3d centroid_;
  double scale_ = 1.0;
  Eigen::Matrix3Xd frame_; ///< orthonormal tangent axes, one column per simplex dim
  std::vector<std::array<int, 3>> exps_;
  Eigen::MatrixXd coeff_; ///< (i,j): weight of monomial i in basis function j
  int degree_ = 0;
  int sdim_ = 0;
};

} // namespace wgstokes
