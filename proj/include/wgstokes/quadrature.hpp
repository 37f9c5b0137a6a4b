// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace wgstokes {

/// Quadrature rule on the reference d-simplex, stored in barycentric
/// coordinates. Weights carry the reference measure: they sum to 1 on the
/// segment, 1/2 on the triangle, 1/6 on the tetrahedron.
///
/// Immutable after construction; safe to share across threads.
struct QuadRule {
  int dim = 0;          ///< simplex dimension (1, 2 or 3)
  int exact_degree = 0; ///< polynomials up to this total degree integrate exactly
  Eigen::MatrixXd points;  ///< n x (dim+1), rows are barycentric coordinates summing to 1
  Eigen::VectorXd weights; ///< n positive reference-measure weights

  int size() const { return static_cast<int>(weights.size()); }
};

/// Rule transported to a physical simplex: ambient-space points (z = 0 when the
/// ambient dimension is 2) and weights rescaled by the physical measure.
struct MappedRule {
  Eigen::Matrix3Xd points; ///< one column per node, ambient coordinates
  Eigen::VectorXd weights; ///< sums to the physical length/area/volume

  int size() const { return static_cast<int>(weights.size()); }
};

/// Build a rule on the reference d-simplex exact for polynomials of total
/// degree <= `degree`. Gauss–Legendre on the segment; collapsed Gauss products
/// (Duffy-style) on triangles and tetrahedra, which keeps all weights positive
/// and makes the exactness degree provable from the 1D rule alone.
///
/// Throws ConfigError unless 1 <= dim <= 3 and 0 <= degree <= 20.
QuadRule simplex_rule(int dim, int degree);

/// Map `rule` onto the simplex spanned by the columns of `vertices`
/// (rule.dim + 1 columns; the ambient space may have higher dimension than the
/// simplex, e.g. a triangular face of a tetrahedron, or a segment laid out in
/// the plane). Throws NumericError if the simplex is (nearly) degenerate.
MappedRule map_rule(const QuadRule& rule, const Eigen::Matrix3Xd& vertices);

/// Measure (length/area/volume) of the simplex spanned by the columns of
/// `vertices`, valid for any ambient dimension >= the simplex dimension.
double simplex_measure(const Eigen::Matrix3Xd& vertices);

} // namespace wgstokes
