// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/spaces.hpp"

#include <algorithm>
#include <string>

#include "wgstokes/errors.hpp"
#include "wgstokes/quadrature.hpp"

namespace wgstokes {

namespace {

int dim_poly(int sdim, int m) {
  if (m < 0) return 0;
  if (sdim == 1) return m + 1;
  if (sdim == 2) return (m + 1) * (m + 2) / 2;
  return (m + 1) * (m + 2) * (m + 3) / 6;
}

} // namespace

// ---------------------------------------------------------------------------
// PressureSpace

PressureSpace::PressureSpace(const SimplicialMesh& mesh, int k) : mesh_(&mesh) {
  if (k < 1) throw ConfigError("PressureSpace: velocity degree must be >= 1");
  degree_ = k - 1;
  per_cell_ = dim_poly(mesh.dim, degree_);
  bases_.reserve(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c)
    bases_.emplace_back(mesh.cell_vertex_matrix(c), degree_, "cell " + std::to_string(c));
}

Eigen::VectorXd PressureSpace::project(const ScalarField& f, int quad_degree) const {
  Eigen::VectorXd out(total_dofs());
  for (int c = 0; c < mesh_->num_cells(); ++c)
    out.segment(cell_offset(c), per_cell_) = bases_[c].project(f, quad_degree);
  return out;
}

Eigen::VectorXd PressureSpace::mean_row(int quad_degree) const {
  return project([](const Eigen::Vector3d&) { return 1.0; }, quad_degree);
}

double PressureSpace::eval(const Eigen::VectorXd& coeffs, int cell, const Eigen::Vector3d& x) const {
  return bases_[cell].eval(x).dot(coeffs.segment(cell_offset(cell), per_cell_));
}

// ---------------------------------------------------------------------------
// HdivSpace

HdivSpace::HdivSpace(const SimplicialMesh& mesh, int k, int quad_degree)
    : mesh_(&mesh), k_(k), quad_degree_(std::max(quad_degree, 2 * k)) {
  if (k < 1 || k > 4) throw ConfigError("HdivSpace: degree must be in [1,4], got " + std::to_string(k));
  dim_ = mesh.dim;
  n_scalar_ = dim_poly(dim_, k);
  n_coeff_ = dim_ * n_scalar_;
  face_dofs_ = dim_poly(dim_ - 1, k);
  interior_dofs_ = n_coeff_ - (dim_ + 1) * face_dofs_;
  if (interior_dofs_ < 0)
    throw ConfigError("HdivSpace: unsupported degree/dimension combination");

  interior_base_ = static_cast<std::int64_t>(face_dofs_) * mesh.num_faces();
  total_dofs_ = interior_base_ + static_cast<std::int64_t>(interior_dofs_) * mesh.num_cells();

  face_bases_.reserve(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f)
    face_bases_.emplace_back(mesh.face_vertex_matrix(f), k, "face " + std::to_string(f));

  cell_bases_.reserve(mesh.num_cells());
  dof_to_coeff_.reserve(mesh.num_cells());
  coeff_to_dof_.reserve(mesh.num_cells());
  interior_null_.reserve(mesh.num_cells());

  const int n_fd = (dim_ + 1) * face_dofs_;
  const QuadRule face_rule = simplex_rule(dim_ - 1, quad_degree_);

  for (int c = 0; c < mesh.num_cells(); ++c) {
    cell_bases_.emplace_back(mesh.cell_vertex_matrix(c), k, "cell " + std::to_string(c));
    const ScalarBasis& cb = cell_bases_.back();

    // Face-moment matrix: row (l,m) applies "moment of v·n_f against the m-th
    // face basis function" to the (comp,i) coefficient basis member b_i e_comp.
    // Flat faces make n_f constant, so each row block is n_comp times a
    // face-mass coupling between the face basis and the cell scalar basis.
    Eigen::MatrixXd M(n_fd, n_coeff_);
    for (int l = 0; l <= dim_; ++l) {
      const int f = mesh.cell_faces[c][l];
      const Face& face = mesh.faces[f];
      MappedRule rule = map_rule(face_rule, mesh.face_vertex_matrix(f));
      Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(face_dofs_, n_scalar_);
      for (int q = 0; q < rule.size(); ++q)
        coupling += rule.weights[q] * face_bases_[f].eval(rule.points.col(q)) *
                    cb.eval(rule.points.col(q)).transpose();
      for (int comp = 0; comp < dim_; ++comp)
        M.block(l * face_dofs_, comp * n_scalar_, face_dofs_, n_scalar_) =
            face.normal[comp] * coupling;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv[n_fd - 1] > 1e-12 * sv[0]))
      throw NumericError("HdivSpace: face moments rank-deficient on cell " + std::to_string(c));
    Eigen::MatrixXd null = svd.matrixV().rightCols(interior_dofs_);

    Eigen::MatrixXd V(n_coeff_, n_coeff_);
    V.topRows(n_fd) = M;
    V.bottomRows(interior_dofs_) = null.transpose();
    // V V^T is block diagonal (M N = 0, N^T N = I), so the spectrum of V is
    // the spectrum of M plus `interior_dofs_` ones: the condition estimate is
    // free, no second decomposition needed.
    const double smax = std::max(sv[0], 1.0);
    const double smin = std::min(sv[n_fd - 1], 1.0);
    if (smax / smin > 1e12)
      throw NumericError("HdivSpace: local Vandermonde unusable on cell " + std::to_string(c) +
                         " (condition " + std::to_string(smax / smin) + ")");

    dof_to_coeff_.push_back(V.partialPivLu().solve(Eigen::MatrixXd::Identity(n_coeff_, n_coeff_)));
    coeff_to_dof_.push_back(std::move(V));
    interior_null_.push_back(std::move(null));
  }

  boundary_dofs_.clear();
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (mesh.faces[f].is_boundary())
      for (int m = 0; m < face_dofs_; ++m) boundary_dofs_.push_back(face_offset(f) + m);
}

std::vector<std::int64_t> HdivSpace::local_dofs(int c) const {
  std::vector<std::int64_t> dofs;
  dofs.reserve(n_coeff_);
  for (int l = 0; l <= dim_; ++l) {
    const std::int64_t base = face_offset(mesh_->cell_faces[c][l]);
    for (int m = 0; m < face_dofs_; ++m) dofs.push_back(base + m);
  }
  const std::int64_t ibase = interior_offset(c);
  for (int r = 0; r < interior_dofs_; ++r) dofs.push_back(ibase + r);
  return dofs;
}

Eigen::VectorXd HdivSpace::local_coeffs(const Eigen::VectorXd& global, int c) const {
  const auto dofs = local_dofs(c);
  Eigen::VectorXd vals(n_coeff_);
  for (int i = 0; i < n_coeff_; ++i) vals[i] = global[dofs[i]];
  return dof_to_coeff_[c] * vals;
}

Eigen::Vector3d HdivSpace::eval(const Eigen::VectorXd& global, int c, const Eigen::Vector3d& x) const {
  const Eigen::VectorXd coeffs = local_coeffs(global, c);
  const Eigen::VectorXd vals = cell_bases_[c].eval(x);
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int comp = 0; comp < dim_; ++comp)
    out[comp] = coeffs.segment(comp * n_scalar_, n_scalar_).dot(vals);
  return out;
}

double HdivSpace::eval_divergence(const Eigen::VectorXd& global, int c,
                                  const Eigen::Vector3d& x) const {
  const Eigen::VectorXd coeffs = local_coeffs(global, c);
  const Eigen::MatrixXd grads = cell_bases_[c].eval_grad(x);
  double div = 0.0;
  for (int comp = 0; comp < dim_; ++comp)
    div += coeffs.segment(comp * n_scalar_, n_scalar_).dot(grads.col(comp));
  return div;
}

Eigen::VectorXd HdivSpace::interpolate(const VectorField& v, int quad_degree) const {
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(total_dofs_);
  // Below 2k the componentwise projection would be inexact even for members of
  // the space itself; clamp so interpolation always reproduces them.
  const int qd = std::max(quad_degree, 2 * k_);
  const QuadRule face_rule = simplex_rule(dim_ - 1, qd);
  const QuadRule cell_rule = simplex_rule(dim_, qd);

  for (int f = 0; f < mesh_->num_faces(); ++f) {
    MappedRule rule = map_rule(face_rule, mesh_->face_vertex_matrix(f));
    const Eigen::Vector3d n = mesh_->faces[f].normal;
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(face_dofs_);
    for (int q = 0; q < rule.size(); ++q)
      moments += rule.weights[q] * v(rule.points.col(q)).dot(n) * face_bases_[f].eval(rule.points.col(q));
    dofs.segment(face_offset(f), face_dofs_) = moments;
  }

  if (interior_dofs_ == 0) return dofs;
  const int n_fd = (dim_ + 1) * face_dofs_;
  const int n_grad = dim_poly(dim_, k_ - 1) - 1; // gradients of P_{k-1} modulo constants

  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const ScalarBasis& cb = cell_bases_[c];
    MappedRule rule = map_rule(cell_rule, mesh_->cell_vertex_matrix(c));

    // Componentwise L2 projection of v onto the coefficient basis.
    Eigen::VectorXd vproj = Eigen::VectorXd::Zero(n_coeff_);
    // Gradient-moment rows and their data.
    Eigen::MatrixXd Gm = Eigen::MatrixXd::Zero(n_grad, n_coeff_);
    Eigen::VectorXd gdata = Eigen::VectorXd::Zero(n_grad);
    ScalarBasis pb(mesh_->cell_vertex_matrix(c), k_ - 1, "cell " + std::to_string(c));
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d x = rule.points.col(q);
      const double w = rule.weights[q];
      const Eigen::VectorXd bv = cb.eval(x);
      const Eigen::Vector3d vx = v(x);
      const Eigen::MatrixXd pg = pb.eval_grad(x); // (n_grad+1) x 3
      for (int comp = 0; comp < dim_; ++comp)
        vproj.segment(comp * n_scalar_, n_scalar_) += w * vx[comp] * bv;
      for (int g = 0; g < n_grad; ++g) {
        for (int comp = 0; comp < dim_; ++comp)
          Gm.row(g).segment(comp * n_scalar_, n_scalar_) += w * pg(g + 1, comp) * bv.transpose();
        gdata[g] += w * vx.head(dim_).dot(pg.row(g + 1).head(dim_));
      }
    }

    // Constraints: the cell's face moments (already computed globally) and the
    // gradient moments. Solve the closest-point problem from the projection.
    const int n_con = n_fd + n_grad;
    Eigen::MatrixXd C(n_con, n_coeff_);
    C.topRows(n_fd) = coeff_to_dof_[c].topRows(n_fd);
    C.bottomRows(n_grad) = Gm;
    Eigen::VectorXd b(n_con);
    for (int l = 0; l <= dim_; ++l)
      b.segment(l * face_dofs_, face_dofs_) =
          dofs.segment(face_offset(mesh_->cell_faces[c][l]), face_dofs_);
    b.tail(n_grad) = gdata;

    Eigen::LLT<Eigen::MatrixXd> llt((C * C.transpose()).eval());
    if (llt.info() != Eigen::Success)
      throw NumericError("HdivSpace: interpolation constraints degenerate on cell " +
                         std::to_string(c));
    const Eigen::VectorXd coeffs =
        vproj + C.transpose() * llt.solve(b - C * vproj);
    dofs.segment(interior_offset(c), interior_dofs_) = interior_null_[c].transpose() * coeffs;
  }
  return dofs;
}

Eigen::VectorXd HdivSpace::boundary_values(const VectorField& g, int quad_degree) const {
  const QuadRule face_rule = simplex_rule(dim_ - 1, std::max(quad_degree, 2 * k_));
  Eigen::VectorXd vals = Eigen::VectorXd::Zero(boundary_dofs_.size());
  std::int64_t idx = 0;
  for (int f = 0; f < mesh_->num_faces(); ++f) {
    if (!mesh_->faces[f].is_boundary()) continue;
    MappedRule rule = map_rule(face_rule, mesh_->face_vertex_matrix(f));
    const Eigen::Vector3d n = mesh_->faces[f].normal;
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(face_dofs_);
    for (int q = 0; q < rule.size(); ++q)
      moments += rule.weights[q] * g(rule.points.col(q)).dot(n) * face_bases_[f].eval(rule.points.col(q));
    vals.segment(idx, face_dofs_) = moments;
    idx += face_dofs_;
  }
  return vals;
}

} // namespace wgstokes
