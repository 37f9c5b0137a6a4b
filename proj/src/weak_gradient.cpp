// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/weak_gradient.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "wgstokes/quadrature.hpp"

namespace wgstokes {

WeakGradient::WeakGradient(const HdivSpace& space, int cell, int quad_degree,
                           BoundaryConvention convention)
    : space_(&space),
      cell_(cell),
      tbasis_(space.mesh().cell_vertex_matrix(cell), space.degree() + 1,
              "cell " + std::to_string(cell)),
      convention_(convention) {
  const SimplicialMesh& mesh = space.mesh();
  const int d = mesh.dim;
  // The face integrand pairs P_k traces with the P_{k+1} tensor basis; clamp
  // so the moments are always exact.
  quad_degree = std::max(quad_degree, 2 * space.degree() + 2);
  const int n_m = tbasis_.size();           // dim P_{k+1}
  const int n_s = space.cell_basis(cell_).size(); // dim P_k
  const int n_coeff = space.coeffs_per_cell();
  const int n_tensor = d * d * n_m;

  // Patch DOF bookkeeping: own cell first, neighbors appended, shared face
  // DOFs deduplicated so their contributions accumulate in one column.
  std::unordered_map<std::int64_t, int> col_of;
  auto col = [&](std::int64_t dof) {
    auto [it, inserted] = col_of.try_emplace(dof, static_cast<int>(patch_.size()));
    if (inserted) patch_.push_back(dof);
    return it->second;
  };
  const auto own_dofs = space.local_dofs(cell_);
  for (std::int64_t dof : own_dofs) col(dof);

  // Coefficient-space contribution of a side cell's trace on one face:
  //   (m,r,s) <- weight * n_s * integral_f b_side_i * t_m  against (comp=r, i).
  // Returned as the face coupling E[i,m] = integral_f b_side_i t_m; callers
  // scatter it into rows via the constant face normal.
  const QuadRule face_rule = simplex_rule(d - 1, quad_degree);
  auto face_coupling = [&](int f, int side_cell) {
    MappedRule rule = map_rule(face_rule, mesh.face_vertex_matrix(f));
    const ScalarBasis& sb = space.cell_basis(side_cell);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(sb.size(), n_m);
    for (int q = 0; q < rule.size(); ++q)
      E += rule.weights[q] * sb.eval(rule.points.col(q)) * tbasis_.eval(rule.points.col(q)).transpose();
    return E;
  };

  // Own-cell block in coefficient space: the volume term -(v, div tau)_T plus
  // this cell's share of the face averages.
  Eigen::MatrixXd own_block = Eigen::MatrixXd::Zero(n_tensor, n_coeff);
  {
    MappedRule rule = map_rule(simplex_rule(d, quad_degree), mesh.cell_vertex_matrix(cell_));
    const ScalarBasis& cb = space.cell_basis(cell_);
    // D_s[i,m] = integral_T b_i * d_s t_m
    std::vector<Eigen::MatrixXd> D(d, Eigen::MatrixXd::Zero(n_s, n_m));
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::VectorXd bv = cb.eval(rule.points.col(q));
      const Eigen::MatrixXd tg = tbasis_.eval_grad(rule.points.col(q)); // n_m x 3
      for (int s = 0; s < d; ++s)
        D[s] += rule.weights[q] * bv * tg.col(s).transpose();
    }
    // div tau for tau = t_m E_{rs} is (d_s t_m) e_r: the volume term couples
    // component r of v with d_s t_m.
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s)
        for (int m = 0; m < n_m; ++m)
          own_block.row((r * d + s) * n_m + m).segment(r * n_s, n_s) -=
              D[s].col(m).transpose();

    for (int l = 0; l <= d; ++l) {
      const int f = mesh.cell_faces[cell_][l];
      const Face& face = mesh.faces[f];
      double weight = face.is_boundary() ? convention_.own_weight : 0.5;
      // The boundary integral wants this cell's outward normal; the stored
      // face normal points owner -> neighbor.
      if (face.owner != cell_) weight = -weight;
      if (weight == 0.0) continue;
      const Eigen::MatrixXd E = face_coupling(f, cell_);
      // (v, tau . n) on the face: tau . n = t_m n_s e_r.
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s)
          for (int m = 0; m < n_m; ++m)
            own_block.row((r * d + s) * n_m + m).segment(r * n_s, n_s) +=
                weight * face.normal[s] * E.col(m).transpose();
    }
  }

  op_ = own_block * space.dof_to_coeff(cell_); // columns grow as neighbors join the patch

  // Neighbor contributions: half of their trace on the shared face.
  for (int l = 0; l <= d; ++l) {
    const int f = mesh.cell_faces[cell_][l];
    const Face& face = mesh.faces[f];
    if (face.is_boundary()) continue;
    const int nbr = face.owner == cell_ ? face.neighbor : face.owner;
    const double half = face.owner == cell_ ? 0.5 : -0.5; // outward normal again
    const Eigen::MatrixXd E = face_coupling(f, nbr);
    const int nbr_scalar = space.cell_basis(nbr).size();
    Eigen::MatrixXd nbr_block = Eigen::MatrixXd::Zero(n_tensor, n_coeff);
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s)
        for (int m = 0; m < n_m; ++m)
          nbr_block.row((r * d + s) * n_m + m).segment(r * nbr_scalar, nbr_scalar) +=
              half * face.normal[s] * E.col(m).transpose();
    const Eigen::MatrixXd nbr_cols = nbr_block * space.dof_to_coeff(nbr);

    const auto nbr_dofs = space.local_dofs(nbr);
    // Ensure all neighbor DOFs have columns (the shared face's DOFs already
    // do), zero-init the new ones, then accumulate.
    std::vector<int> cols(nbr_dofs.size());
    for (size_t j = 0; j < nbr_dofs.size(); ++j) cols[j] = col(nbr_dofs[j]);
    const int old_cols = static_cast<int>(op_.cols());
    const int new_cols = static_cast<int>(patch_.size());
    if (new_cols > old_cols) {
      op_.conservativeResize(Eigen::NoChange, new_cols);
      op_.rightCols(new_cols - old_cols).setZero();
    }
    for (size_t j = 0; j < nbr_dofs.size(); ++j)
      op_.col(cols[j]) += nbr_cols.col(static_cast<int>(j));
  }
}

Eigen::VectorXd WeakGradient::apply(const Eigen::VectorXd& global) const {
  Eigen::VectorXd vals(patch_.size());
  for (size_t i = 0; i < patch_.size(); ++i) vals[static_cast<int>(i)] = global[patch_[i]];
  return op_ * vals;
}

Eigen::VectorXd WeakGradient::lift(const VectorField& g, int quad_degree) const {
  const SimplicialMesh& mesh = space_->mesh();
  const int d = mesh.dim;
  const int n_m = tbasis_.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_tensor());
  if (convention_.data_weight == 0.0) return out;
  const QuadRule face_rule =
      simplex_rule(d - 1, std::max(quad_degree, 2 * space_->degree() + 2));
  for (int l = 0; l <= d; ++l) {
    const int f = mesh.cell_faces[cell_][l];
    const Face& face = mesh.faces[f];
    if (!face.is_boundary()) continue;
    MappedRule rule = map_rule(face_rule, mesh.face_vertex_matrix(f));
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d gv = g(rule.points.col(q));
      const Eigen::VectorXd tv = tbasis_.eval(rule.points.col(q));
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s)
          out.segment((r * d + s) * n_m, n_m) +=
              convention_.data_weight * rule.weights[q] * gv[r] * face.normal[s] * tv;
    }
  }
  return out;
}

} // namespace wgstokes
