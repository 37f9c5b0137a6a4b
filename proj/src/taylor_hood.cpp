// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/taylor_hood.hpp"

#include <cmath>

#include "wgstokes/errors.hpp"
#include "wgstokes/quadrature.hpp"

namespace wgstokes {

namespace {

// Runs before the member spaces are built, so a bad configuration reports
// itself instead of surfacing as a puzzling space-construction failure.
int checked_conforming_degree(const SimplicialMesh& mesh, int k, const StokesProblem& problem) {
  if (mesh.dim != 2) {
    throw ConfigError("the conforming discretization is implemented on triangles only");
  }
  if (k < 2 || k > 3) {
    throw ConfigError("conforming velocity degree must be 2 or 3");
  }
  if (!(problem.mu > 0.0)) {
    throw ConfigError("viscosity must be positive");
  }
  if (!problem.forcing) {
    throw ConfigError("the problem needs a forcing field");
  }
  return k;
}

} // namespace

TaylorHoodSystem::TaylorHoodSystem(const SimplicialMesh& mesh, int k,
                                   const StokesProblem& problem, int quad_degree)
    : mesh_(&mesh), vspace_(mesh, checked_conforming_degree(mesh, k, problem)),
      pspace_(mesh, k - 1), mu_(problem.mu) {
  quad_degree_ = quad_degree > 0 ? quad_degree : 2 * k + 6;

  const std::int64_t n_nodes = vspace_.num_nodes();
  const std::int64_t n_vel = 2 * n_nodes;
  const std::int64_t n_press = pspace_.num_nodes();

  // Pin both components at boundary nodes; nodal interpolation of the data.
  pinned_values_ = Eigen::VectorXd::Zero(n_vel);
  position_.assign(n_vel, -1);
  std::vector<char> pinned(n_vel, 0);
  for (std::int64_t n : vspace_.boundary_nodes()) {
    pinned[n] = 1;
    pinned[n_nodes + n] = 1;
    if (problem.boundary_velocity) {
      const Eigen::Vector3d g = problem.boundary_velocity(vspace_.node(n));
      pinned_values_[n] = g[0];
      pinned_values_[n_nodes + n] = g[1];
    }
  }
  free_.clear();
  for (std::int64_t i = 0; i < n_vel; ++i) {
    if (!pinned[i]) {
      position_[i] = static_cast<std::int64_t>(free_.size());
      free_.push_back(i);
    }
  }
  const std::int64_t nf = n_free();

  const QuadRule ref = simplex_rule(2, quad_degree_);
  const int nv = vspace_.nodes_per_cell();
  const int np = pspace_.nodes_per_cell();

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs_u = Eigen::VectorXd::Zero(nf);
  Eigen::VectorXd rhs_p = Eigen::VectorXd::Zero(n_press);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n_press);

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const MappedRule rule = map_rule(ref, mesh.cell_vertex_matrix(c));
    const std::vector<std::int64_t>& vn = vspace_.cell_nodes(c);
    const std::vector<std::int64_t>& pn = pspace_.cell_nodes(c);

    // Scalar stiffness (shared by both velocity components), divergence
    // coupling, forcing moments and the pressure-mean row, all in one sweep.
    Eigen::MatrixXd ks = Eigen::MatrixXd::Zero(nv, nv);
    Eigen::MatrixXd dloc = Eigen::MatrixXd::Zero(np, 2 * nv);
    Eigen::VectorXd floc = Eigen::VectorXd::Zero(2 * nv);
    Eigen::VectorXd mloc = Eigen::VectorXd::Zero(np);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d x = rule.points.col(q);
      const double w = rule.weights[q];
      const Eigen::VectorXd sh = vspace_.shape(c, x);
      const Eigen::MatrixXd sg = vspace_.shape_grad(c, x); // nv x 3
      const Eigen::VectorXd psh = pspace_.shape(c, x);
      ks.noalias() += (w * mu_) * (sg * sg.transpose());
      const Eigen::Vector3d f = problem.forcing(x);
      for (int comp = 0; comp < 2; ++comp) {
        dloc.block(0, comp * nv, np, nv).noalias() += w * (psh * sg.col(comp).transpose());
        floc.segment(comp * nv, nv).noalias() += (w * f[comp]) * sh;
      }
      mloc.noalias() += w * psh;
    }

    for (int comp = 0; comp < 2; ++comp) {
      for (int i = 0; i < nv; ++i) {
        const std::int64_t row = comp * n_nodes + vn[i];
        const std::int64_t ri = position_[row];
        for (int j = 0; j < nv; ++j) {
          const std::int64_t col = comp * n_nodes + vn[j];
          const double v = ks(i, j);
          if (v == 0.0) continue;
          if (ri >= 0 && position_[col] >= 0) {
            trips.emplace_back(ri, position_[col], v);
          } else if (ri >= 0) {
            rhs_u[ri] -= v * pinned_values_[col];
          }
        }
        if (ri >= 0) {
          rhs_u[ri] += floc[comp * nv + i];
        }
      }
    }
    for (int pq = 0; pq < np; ++pq) {
      const std::int64_t prow = pn[pq];
      for (int comp = 0; comp < 2; ++comp) {
        for (int i = 0; i < nv; ++i) {
          const std::int64_t col = comp * n_nodes + vn[i];
          const double v = dloc(pq, comp * nv + i);
          if (v == 0.0) continue;
          if (position_[col] >= 0) {
            trips.emplace_back(nf + prow, position_[col], -v);
            trips.emplace_back(position_[col], nf + prow, -v);
          } else {
            rhs_p[prow] += v * pinned_values_[col];
          }
        }
      }
      mean[prow] += mloc[pq];
    }
  }

  // Bordering row/column enforcing the zero pressure mean.
  for (std::int64_t q = 0; q < n_press; ++q) {
    trips.emplace_back(nf + q, nf + n_press, mean[q]);
    trips.emplace_back(nf + n_press, nf + q, mean[q]);
  }

  kkt_.resize(size(), size());
  kkt_.setFromTriplets(trips.begin(), trips.end());
  kkt_.makeCompressed();

  rhs_ = Eigen::VectorXd::Zero(size());
  rhs_.head(nf) = rhs_u;
  rhs_.segment(nf, n_press) = rhs_p;
}

Eigen::VectorXd TaylorHoodSystem::solve(const std::string& method, SolveReport& report) const {
  if (method == "direct") {
    return sparse_lu_solve(kkt_, rhs_, report);
  }
  if (method == "minres") {
    // Diagonal preconditioner: the velocity block's own diagonal, and the
    // viscosity scale for the pressure/multiplier rows so the blocks balance.
    const std::int64_t nf = n_free();
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(size(), mu_);
    for (std::int64_t i = 0; i < nf; ++i) {
      diag[i] = kkt_.coeff(i, i);
    }
    const double floor = 1e-12 * diag.head(nf).maxCoeff() + 1e-300;
    Eigen::VectorXd inv_diag(size());
    for (std::int64_t i = 0; i < size(); ++i) {
      inv_diag[i] = 1.0 / std::max(diag[i], floor);
    }
    return minres_solve(kkt_, rhs_, inv_diag, 1e-13, 200000, report);
  }
  throw ConfigError("unknown solver '" + method + "' (use direct or minres)");
}

Eigen::VectorXd TaylorHoodSystem::full_velocity(const Eigen::VectorXd& x) const {
  if (x.size() != size()) {
    throw ConfigError("solution vector has the wrong length");
  }
  Eigen::VectorXd u = pinned_values_;
  for (std::size_t i = 0; i < free_.size(); ++i) {
    u[free_[i]] = x[static_cast<std::int64_t>(i)];
  }
  return u;
}

Eigen::VectorXd TaylorHoodSystem::pressure(const Eigen::VectorXd& x) const {
  if (x.size() != size()) {
    throw ConfigError("solution vector has the wrong length");
  }
  return x.segment(n_free(), n_pressure());
}

TaylorHoodSystem::Errors TaylorHoodSystem::measure_errors(
    const Eigen::VectorXd& velocity_nodes, const Eigen::VectorXd& pressure_nodes,
    const VectorField& exact_velocity, const MatrixField& exact_velocity_gradient,
    const ScalarField& exact_pressure, int quad_degree) const {
  if (velocity_nodes.size() != 2 * vspace_.num_nodes()) {
    throw ConfigError("nodal velocity vector has the wrong length");
  }
  if (pressure_nodes.size() != pspace_.num_nodes()) {
    throw ConfigError("nodal pressure vector has the wrong length");
  }
  if (!exact_velocity || !exact_velocity_gradient || !exact_pressure) {
    throw ConfigError("error measurement needs the exact velocity, gradient and pressure");
  }

  const std::int64_t n_nodes = vspace_.num_nodes();
  const QuadRule ref = simplex_rule(2, quad_degree);
  double vel2 = 0.0;
  double grad2 = 0.0;
  double press2 = 0.0;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const MappedRule rule = map_rule(ref, mesh_->cell_vertex_matrix(c));
    const std::vector<std::int64_t>& vn = vspace_.cell_nodes(c);
    const std::vector<std::int64_t>& pn = pspace_.cell_nodes(c);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d x = rule.points.col(q);
      const double w = rule.weights[q];
      const Eigen::VectorXd sh = vspace_.shape(c, x);
      const Eigen::MatrixXd sg = vspace_.shape_grad(c, x);
      const Eigen::VectorXd psh = pspace_.shape(c, x);

      const Eigen::Vector3d ue = exact_velocity(x);
      const Eigen::Matrix3d ge = exact_velocity_gradient(x);
      for (int comp = 0; comp < 2; ++comp) {
        double uh = 0.0;
        Eigen::Vector2d gh = Eigen::Vector2d::Zero();
        for (int i = 0; i < static_cast<int>(vn.size()); ++i) {
          const double nodal = velocity_nodes[comp * n_nodes + vn[i]];
          uh += nodal * sh[i];
          gh[0] += nodal * sg(i, 0);
          gh[1] += nodal * sg(i, 1);
        }
        const double du = uh - ue[comp];
        vel2 += w * du * du;
        const double d0 = gh[0] - ge(comp, 0);
        const double d1 = gh[1] - ge(comp, 1);
        grad2 += w * (d0 * d0 + d1 * d1);
      }
      double ph = 0.0;
      for (int i = 0; i < static_cast<int>(pn.size()); ++i) {
        ph += pressure_nodes[pn[i]] * psh[i];
      }
      const double dp = ph - exact_pressure(x);
      press2 += w * dp * dp;
    }
  }

  Errors out;
  out.velocity_l2 = std::sqrt(vel2);
  out.gradient = std::sqrt(grad2);
  out.pressure_l2 = std::sqrt(press2);
  return out;
}

} // namespace wgstokes
