// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wgstokes/fields.hpp"
#include "wgstokes/mesh.hpp"
#include "wgstokes/polybasis.hpp"

namespace wgstokes {

/// Continuous scalar Lagrange P_m space on a simplicial mesh, with nodes on
/// the equispaced barycentric lattice. Shared nodes are identified
/// combinatorially — by their weighted vertex support — so conformity never
/// depends on floating-point coordinate matching.
class LagrangeSpace {
public:
  LagrangeSpace(const SimplicialMesh& mesh, int m);

  const SimplicialMesh& mesh() const { return *mesh_; }
  int degree() const { return m_; }
  int nodes_per_cell() const { return nodes_per_cell_; }
  std::int64_t num_nodes() const { return static_cast<std::int64_t>(node_coords_.size()); }
  const Eigen::Vector3d& node(std::int64_t i) const { return node_coords_[i]; }
  /// Global node ids of cell c in lattice order.
  const std::vector<std::int64_t>& cell_nodes(int c) const { return cell_nodes_[c]; }
  /// Nodes lying on the domain boundary, ascending.
  const std::vector<std::int64_t>& boundary_nodes() const { return boundary_nodes_; }

  /// Values of the cell's nodal shape functions at an ambient point.
  Eigen::VectorXd shape(int c, const Eigen::Vector3d& x) const;
  /// Gradients of the nodal shape functions, nodes_per_cell x 3.
  Eigen::MatrixXd shape_grad(int c, const Eigen::Vector3d& x) const;

  /// Nodal interpolation of a scalar function.
  Eigen::VectorXd interpolate(const ScalarField& f) const;

private:
  const SimplicialMesh* mesh_;
  int m_;
  int nodes_per_cell_;
  std::vector<Eigen::Vector3d> node_coords_;
  std::vector<std::vector<std::int64_t>> cell_nodes_;
  std::vector<std::int64_t> boundary_nodes_;
  std::vector<ScalarBasis> bases_;          ///< orthonormal modal carrier per cell
  std::vector<Eigen::MatrixXd> nodal_from_modal_; ///< shape = modal^T * this
};

} // namespace wgstokes
