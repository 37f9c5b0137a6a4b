// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/lagrange.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "wgstokes/errors.hpp"

namespace wgstokes {

namespace {

/// Barycentric lattice multi-indices (alpha_0..alpha_d, sum = m), fixed order.
std::vector<std::array<int, 4>> lattice(int d, int m) {
  std::vector<std::array<int, 4>> pts;
  if (d == 2) {
    for (int a = m; a >= 0; --a)
      for (int b = m - a; b >= 0; --b) pts.push_back({{a, b, m - a - b, 0}});
  } else {
    for (int a = m; a >= 0; --a)
      for (int b = m - a; b >= 0; --b)
        for (int c = m - a - b; c >= 0; --c) pts.push_back({{a, b, c, m - a - b - c}});
  }
  return pts;
}

} // namespace

LagrangeSpace::LagrangeSpace(const SimplicialMesh& mesh, int m) : mesh_(&mesh), m_(m) {
  if (m < 1 || m > 6) throw ConfigError("LagrangeSpace: degree must be in [1,6]");
  const int d = mesh.dim;
  const auto lat = lattice(d, m);
  nodes_per_cell_ = static_cast<int>(lat.size());

  // Combinatorial identity of a lattice point: its weighted vertex support.
  using Key = std::vector<std::pair<int, int>>;
  std::map<Key, std::int64_t> ids;
  cell_nodes_.assign(mesh.num_cells(), {});

  for (int c = 0; c < mesh.num_cells(); ++c) {
    cell_nodes_[c].reserve(nodes_per_cell_);
    for (const auto& alpha : lat) {
      Key key;
      for (int v = 0; v <= d; ++v)
        if (alpha[v] > 0) key.emplace_back(mesh.cells[c][v], alpha[v]);
      std::sort(key.begin(), key.end());
      auto [it, inserted] = ids.try_emplace(key, static_cast<std::int64_t>(node_coords_.size()));
      if (inserted) {
        Eigen::Vector3d x = Eigen::Vector3d::Zero();
        for (const auto& [vid, w] : key) x += (double(w) / m) * mesh.vertices[vid];
        node_coords_.push_back(x);
      }
      cell_nodes_[c].push_back(it->second);
    }
  }

  // Boundary nodes: lattice points with no weight on the vertex opposite a
  // boundary face lie on that face.
  std::vector<char> on_boundary(node_coords_.size(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int l = 0; l <= d; ++l) {
      if (!mesh.faces[mesh.cell_faces[c][l]].is_boundary()) continue;
      for (int i = 0; i < nodes_per_cell_; ++i)
        if (lat[i][l] == 0) on_boundary[cell_nodes_[c][i]] = 1;
    }
  for (std::int64_t i = 0; i < num_nodes(); ++i)
    if (on_boundary[i]) boundary_nodes_.push_back(i);

  // Nodal shape functions through the orthonormal modal basis: solve the
  // node-evaluation matrix once per cell.
  bases_.reserve(mesh.num_cells());
  nodal_from_modal_.reserve(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    bases_.emplace_back(mesh.cell_vertex_matrix(c), m, "cell " + std::to_string(c));
    Eigen::MatrixXd E(nodes_per_cell_, nodes_per_cell_);
    for (int i = 0; i < nodes_per_cell_; ++i)
      E.row(i) = bases_.back().eval(node_coords_[cell_nodes_[c][i]]).transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(E);
    nodal_from_modal_.push_back(lu.solve(Eigen::MatrixXd::Identity(nodes_per_cell_, nodes_per_cell_))
                                    .transpose());
  }
}

Eigen::VectorXd LagrangeSpace::shape(int c, const Eigen::Vector3d& x) const {
  return nodal_from_modal_[c] * bases_[c].eval(x);
}

Eigen::MatrixXd LagrangeSpace::shape_grad(int c, const Eigen::Vector3d& x) const {
  return nodal_from_modal_[c] * bases_[c].eval_grad(x);
}

Eigen::VectorXd LagrangeSpace::interpolate(const ScalarField& f) const {
  Eigen::VectorXd vals(num_nodes());
  for (std::int64_t i = 0; i < num_nodes(); ++i) vals[i] = f(node_coords_[i]);
  return vals;
}

} // namespace wgstokes
