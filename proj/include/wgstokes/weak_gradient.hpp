// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wgstokes/fields.hpp"
#include "wgstokes/polybasis.hpp"
#include "wgstokes/spaces.hpp"

namespace wgstokes {

/// How a boundary face enters the trace average of the weak gradient.
/// Interior faces always take the two-sided 1/2 average. On the boundary the
/// analysis convention is a zero average for test functions and the prescribed
/// data for the trial lifting: own_weight = 0 with data_weight 1. The
/// alternates (ghost average 1/2,1/2; own trace 1,0; dropped data 0,0) exist to
/// measure how sensitive inhomogeneous problems are to this choice.
struct BoundaryConvention {
  double own_weight = 0.0;  ///< multiple of the cell's own trace in the matrix
  double data_weight = 1.0; ///< multiple of prescribed data in the lifting
};

/// Discrete weak gradient on one cell: the linear map taking the H(div) DOFs
/// of the cell and its face neighbors to the coefficients of the gradient in
/// an orthonormal [P_{k+1}]^{dxd} basis on the cell. Because the tensor basis
/// is orthonormal, applying the matrix IS computing the L2-projected weak
/// gradient, and Frobenius inner products of weak gradients are dot products
/// of these coefficient vectors.
///
/// Tensor coefficient layout: index t = (r*dim + s)*n_scalar + m is the
/// (r,s) entry carried by the m-th degree-(k+1) scalar basis function.
class WeakGradient {
public:
  WeakGradient(const HdivSpace& space, int cell, int quad_degree,
               BoundaryConvention convention = {});

  int cell() const { return cell_; }
  int n_tensor() const { return static_cast<int>(op_.rows()); }
  const std::vector<std::int64_t>& patch_dofs() const { return patch_; }
  const Eigen::MatrixXd& matrix() const { return op_; }
  /// Degree-(k+1) scalar basis carrying the tensor coefficients.
  const ScalarBasis& tensor_scalar_basis() const { return tbasis_; }

  /// Weak-gradient coefficients of a global discrete field (no lifting).
  Eigen::VectorXd apply(const Eigen::VectorXd& global) const;
  /// Boundary-data contribution to the trial weak gradient; zero unless the
  /// cell touches the boundary and the convention carries data.
  Eigen::VectorXd lift(const VectorField& g, int quad_degree) const;

private:
  const HdivSpace* space_;
  int cell_;
  ScalarBasis tbasis_;
  BoundaryConvention convention_;
  std::vector<std::int64_t> patch_;
  Eigen::MatrixXd op_;
};

} // namespace wgstokes
