// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/assembly.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/SparseCholesky>

#include "wgstokes/errors.hpp"
#include "wgstokes/quadrature.hpp"
#include "wgstokes/solver.hpp"

namespace wgstokes {

SaddleSystem::SaddleSystem(const HdivSpace& velocity, const PressureSpace& pressure,
                           const StokesProblem& problem, const AssemblyOptions& options)
    : velocity_(&velocity), pressure_(&pressure), mu_(problem.mu) {
  if (&velocity.mesh() != &pressure.mesh())
    throw ConfigError("SaddleSystem: velocity and pressure live on different meshes");
  if (pressure.degree() != velocity.degree() - 1)
    throw ConfigError("SaddleSystem: pressure degree must be one below the velocity degree");
  if (!(mu_ > 0.0)) throw ConfigError("SaddleSystem: viscosity must be positive");
  if (!problem.forcing) throw ConfigError("SaddleSystem: forcing field is required");

  const SimplicialMesh& mesh = velocity.mesh();
  const int d = mesh.dim;
  const int k = velocity.degree();
  quad_degree_ = options.quad_degree < 0 ? 2 * k + 6 : options.quad_degree;

  // Free/pinned split and the pinned values (normal moments of the data).
  const std::int64_t n_total = velocity.total_dofs();
  position_.assign(n_total, -1);
  pinned_values_ = Eigen::VectorXd::Zero(n_total);
  {
    std::vector<char> pinned(n_total, 0);
    for (std::int64_t dof : velocity.boundary_dofs()) pinned[dof] = 1;
    if (problem.boundary_velocity) {
      const Eigen::VectorXd vals =
          velocity.boundary_values(problem.boundary_velocity, quad_degree_);
      for (size_t i = 0; i < velocity.boundary_dofs().size(); ++i)
        pinned_values_[velocity.boundary_dofs()[i]] = vals[static_cast<std::int64_t>(i)];
    }
    free_.reserve(n_total - velocity.boundary_dofs().size());
    for (std::int64_t i = 0; i < n_total; ++i) {
      if (pinned[i]) continue;
      position_[i] = static_cast<std::int64_t>(free_.size());
      free_.push_back(i);
    }
  }
  const std::int64_t n_f = n_free();
  const std::int64_t n_p = pressure.total_dofs();
  const bool lifted = static_cast<bool>(problem.boundary_velocity);

  Eigen::VectorXd rhs_u = Eigen::VectorXd::Zero(n_f);
  Eigen::VectorXd rhs_p = Eigen::VectorXd::Zero(n_p);

  // Viscous block, data lifting, and forcing, streamed cell by cell.
  std::vector<Eigen::Triplet<double>> trip_a;
  {
    // patch^2 per cell is a close upper bound on the triplet count
    const std::int64_t patch_guess =
        velocity.coeffs_per_cell() + (d + 1) * (velocity.coeffs_per_cell() - velocity.face_dofs());
    trip_a.reserve(static_cast<size_t>(mesh.num_cells()) * patch_guess * patch_guess);
  }
  const QuadRule cell_rule = simplex_rule(d, quad_degree_);
  const int n_s = velocity.cell_basis(0).size();
  const int n_coeff = velocity.coeffs_per_cell();

  for (int c = 0; c < mesh.num_cells(); ++c) {
    WeakGradient wg(velocity, c, quad_degree_, options.convention);
    const auto& patch = wg.patch_dofs();
    const Eigen::MatrixXd& g = wg.matrix();
    // The Gram product is symmetric only up to GEMM accumulation order;
    // symmetrizing here makes the assembled saddle matrix exactly symmetric.
    Eigen::MatrixXd a_cell = mu_ * (g.transpose() * g);
    a_cell = 0.5 * (a_cell + a_cell.transpose()).eval();

    Eigen::VectorXd r_cell = Eigen::VectorXd::Zero(patch.size());
    if (lifted) {
      const Eigen::VectorXd l = wg.lift(problem.boundary_velocity, quad_degree_);
      if (l.cwiseAbs().maxCoeff() > 0.0) r_cell = -mu_ * (g.transpose() * l);
    }

    for (size_t i = 0; i < patch.size(); ++i) {
      const std::int64_t fi = position_[patch[i]];
      if (fi < 0) continue; // test functions only range over free DOFs
      rhs_u[fi] += r_cell[static_cast<std::int64_t>(i)];
      for (size_t j = 0; j < patch.size(); ++j) {
        const double v = a_cell(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j));
        if (v == 0.0) continue;
        const std::int64_t fj = position_[patch[j]];
        if (fj >= 0)
          trip_a.emplace_back(fi, fj, v);
        else
          rhs_u[fi] -= v * pinned_values_[patch[j]];
      }
    }

    // Forcing moments against the local DOF basis.
    MappedRule rule = map_rule(cell_rule, mesh.cell_vertex_matrix(c));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_coeff);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d fx = problem.forcing(rule.points.col(q));
      const Eigen::VectorXd bv = velocity.cell_basis(c).eval(rule.points.col(q));
      for (int comp = 0; comp < d; ++comp)
        b.segment(comp * n_s, n_s) += rule.weights[q] * fx[comp] * bv;
    }
    const Eigen::VectorXd f_local = velocity.dof_to_coeff(c).transpose() * b;
    const auto local = velocity.local_dofs(c);
    for (int j = 0; j < n_coeff; ++j) {
      const std::int64_t fj = position_[local[j]];
      if (fj >= 0) rhs_u[fj] += f_local[j];
    }
  }
  a_.resize(n_f, n_f);
  a_.setFromTriplets(trip_a.begin(), trip_a.end());
  trip_a.clear();
  trip_a.shrink_to_fit();

  // Divergence pairing (div v, q).
  std::vector<Eigen::Triplet<double>> trip_d;
  trip_d.reserve(static_cast<size_t>(mesh.num_cells()) * pressure.per_cell() * n_coeff);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    MappedRule rule = map_rule(cell_rule, mesh.cell_vertex_matrix(c));
    Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(pressure.per_cell(), n_coeff);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::VectorXd pv = pressure.cell_basis(c).eval(rule.points.col(q));
      const Eigen::MatrixXd bg = velocity.cell_basis(c).eval_grad(rule.points.col(q));
      for (int comp = 0; comp < d; ++comp)
        dc.block(0, comp * n_s, pressure.per_cell(), n_s) +=
            rule.weights[q] * pv * bg.col(comp).transpose();
    }
    const Eigen::MatrixXd d_local = dc * velocity.dof_to_coeff(c);
    const auto local = velocity.local_dofs(c);
    const std::int64_t row0 = pressure.cell_offset(c);
    for (int qi = 0; qi < pressure.per_cell(); ++qi) {
      for (int j = 0; j < n_coeff; ++j) {
        const double v = d_local(qi, j);
        if (v == 0.0) continue;
        const std::int64_t fj = position_[local[j]];
        if (fj >= 0)
          trip_d.emplace_back(row0 + qi, fj, v);
        else
          rhs_p[row0 + qi] += v * pinned_values_[local[j]];
      }
    }
  }
  d_.resize(n_p, n_f);
  d_.setFromTriplets(trip_d.begin(), trip_d.end());
  trip_d.clear();
  trip_d.shrink_to_fit();

  mean_ = pressure.mean_row(quad_degree_);

  // Bordered KKT matrix.
  std::vector<Eigen::Triplet<double>> trip_k;
  trip_k.reserve(static_cast<size_t>(a_.nonZeros()) + 2 * d_.nonZeros() + 2 * n_p);
  for (int col = 0; col < a_.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, col); it; ++it)
      trip_k.emplace_back(it.row(), it.col(), it.value());
  for (int col = 0; col < d_.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d_, col); it; ++it) {
      trip_k.emplace_back(n_f + it.row(), it.col(), -it.value());
      trip_k.emplace_back(it.col(), n_f + it.row(), -it.value());
    }
  for (std::int64_t q = 0; q < n_p; ++q) {
    if (mean_[q] == 0.0) continue;
    trip_k.emplace_back(n_f + q, n_f + n_p, mean_[q]);
    trip_k.emplace_back(n_f + n_p, n_f + q, mean_[q]);
  }
  kkt_.resize(size(), size());
  kkt_.setFromTriplets(trip_k.begin(), trip_k.end());
  kkt_.makeCompressed();

  rhs_ = Eigen::VectorXd::Zero(size());
  rhs_.head(n_f) = rhs_u;
  rhs_.segment(n_f, n_p) = rhs_p;
}

Eigen::VectorXd SaddleSystem::solve(const std::string& method, SolveReport& report) const {
  if (method == "direct") {
    // The bordered matrix carries a dense constraint row/column that ruins
    // sparse elimination orderings at fine levels. Ground the system instead:
    // pin the constant pressure mode of cell 0 and drop the border. The
    // pinned cell's continuity row is implied by the remaining ones whenever
    // the boundary data carry no net flux, and the constant shift is restored
    // afterwards, so the reported residual is still taken on the full system.
    const std::int64_t n_f = n_free();
    const std::int64_t n_p = n_pressure();
    const std::int64_t ng = n_f + n_p - 1;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(a_.nonZeros()) + 2 * d_.nonZeros());
    for (int col = 0; col < a_.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(a_, col); it; ++it)
        trips.emplace_back(it.row(), it.col(), it.value());
    for (int col = 0; col < d_.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(d_, col); it; ++it) {
        if (it.row() == 0) continue; // pinned pressure DOF
        trips.emplace_back(n_f + it.row() - 1, it.col(), -it.value());
        trips.emplace_back(it.col(), n_f + it.row() - 1, -it.value());
      }
    Eigen::SparseMatrix<double> grounded(ng, ng);
    grounded.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd rhs_g(ng);
    rhs_g.head(n_f) = rhs_.head(n_f);
    rhs_g.tail(n_p - 1) = rhs_.segment(n_f + 1, n_p - 1);
    const Eigen::VectorXd xg = sparse_lu_solve(grounded, rhs_g, report);

    // Re-inflate and shift the pressure to zero mean. With the orthonormal
    // cellwise basis, the constant function's coefficient vector is exactly
    // the mean row, and (1,1) = |Omega| = mean.squaredNorm().
    Eigen::VectorXd x = Eigen::VectorXd::Zero(size());
    x.head(n_f) = xg.head(n_f);
    x.segment(n_f + 1, n_p - 1) = xg.tail(n_p - 1);
    const double shift =
        mean_.dot(x.segment(n_f, n_p)) / std::max(mean_.squaredNorm(), 1e-300);
    x.segment(n_f, n_p) -= shift * mean_;

    const double denom = std::max(rhs_.norm(), std::numeric_limits<double>::min());
    report.relative_residual = (rhs_ - kkt_ * x).norm() / denom;
    return x;
  }
  if (method == "penalty") {
    // Iterated penalty (augmented Lagrangian): a single Cholesky factorization
    // of the SPD matrix A/mu + gamma0 D^T D replaces the LU of the indefinite
    // saddle matrix. The penalized matrix has the same cell-local sparsity as
    // A but factors in roughly half the memory and without pivoting-induced
    // fill, which is what makes the finest levels fit. Each sweep contracts
    // the divergence residual by ~1/gamma0 independently of mu. The sweeps
    // are written in defect-correction form, so every solve happens at the
    // scale of the current residual; the attainable floor is set by the
    // gamma-amplified round-off of the pressure updates, which the stopping
    // rule below detects as stagnation. gamma0 trades contraction per sweep
    // against that floor and the conditioning handed to the factorization.
    const double gamma0 = 1e4;
    const std::int64_t n_f = n_free();
    const std::int64_t n_p = n_pressure();

    const Eigen::SparseMatrix<double> dt = d_.transpose();
    Eigen::SparseMatrix<double> ghat = (a_ / mu_ + gamma0 * (dt * d_)).pruned();
    ghat.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                          Eigen::AMDOrdering<int>> chol;
    chol.compute(ghat);
    if (chol.info() != Eigen::Success) {
      throw SolverError("penalty Cholesky factorization failed");
    }

    const Eigen::VectorXd f = rhs_.head(n_f);
    const Eigen::VectorXd rp = rhs_.segment(n_f, n_p);  // rows read -D u = rp
    const double gamma = gamma0 * mu_;
    const double denom = std::max(rhs_.norm(), std::numeric_limits<double>::min());

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n_f);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n_p);
    Eigen::VectorXd best_u, best_p;
    double best_rel = std::numeric_limits<double>::infinity();
    const int max_sweeps = 60;
    const double tol = 1e-13;
    int since_improved = 0;
    for (int m = 0; m < max_sweeps; ++m) {
      const Eigen::VectorXd r_mom = f + dt * p - a_ * u;
      const Eigen::VectorXd viol0 = d_ * u + rp;
      u += chol.solve((r_mom - gamma * (dt * viol0)) / mu_);
      const Eigen::VectorXd viol = d_ * u + rp;
      p -= gamma * viol;
      report.iterations = m + 1;
      const double rm = (a_ * u - dt * p - f).norm();
      const double rel = std::sqrt(rm * rm + viol.squaredNorm()) / denom;
      if (rel < 0.5 * best_rel) {
        since_improved = 0;
      } else {
        ++since_improved;
      }
      if (rel < best_rel) {
        best_rel = rel;
        best_u = u;
        best_p = p;
      }
      if (best_rel < tol || since_improved >= 5) break;
    }
    if (!(best_rel < 1e-9)) {
      throw SolverError("penalty sweeps stagnated at relative residual " +
                        std::to_string(best_rel));
    }

    // Shift the pressure to zero mean (the constant mode never feeds back
    // into the momentum rows, so this costs nothing) and report the residual
    // on the full bordered system.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(size());
    x.head(n_f) = best_u;
    x.segment(n_f, n_p) = best_p;
    const double shift =
        mean_.dot(x.segment(n_f, n_p)) / std::max(mean_.squaredNorm(), 1e-300);
    x.segment(n_f, n_p) -= shift * mean_;
    report.method = "penalty";
    report.relative_residual = (rhs_ - kkt_ * x).norm() / denom;
    return x;
  }
  if (method == "minres") {
    // Diagonal preconditioner: the viscous diagonal for velocity rows, the
    // (identity-mass) pressure Schur scale 1/mu for pressure rows and the
    // multiplier.
    Eigen::VectorXd inv_diag(size());
    const Eigen::VectorXd diag_a = a_.diagonal();
    const double floor = 1e-300 + 1e-12 * diag_a.cwiseAbs().maxCoeff();
    for (std::int64_t i = 0; i < n_free(); ++i)
      inv_diag[i] = 1.0 / std::max(diag_a[i], floor);
    inv_diag.segment(n_free(), n_pressure() + 1).setConstant(mu_);
    return minres_solve(kkt_, rhs_, inv_diag, 1e-13, 200000, report);
  }
  throw ConfigError("SaddleSystem::solve: unknown method '" + method +
                    "' (have: direct, penalty, minres)");
}

Eigen::VectorXd SaddleSystem::full_velocity(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = pinned_values_;
  for (std::int64_t i = 0; i < n_free(); ++i) out[free_[i]] = x[i];
  return out;
}

Eigen::VectorXd SaddleSystem::pressure(const Eigen::VectorXd& x) const {
  return x.segment(n_free(), n_pressure());
}

} // namespace wgstokes
