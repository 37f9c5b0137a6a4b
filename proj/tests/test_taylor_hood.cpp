// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "wgstokes/errors.hpp"
#include "wgstokes/examples.hpp"
#include "wgstokes/mesh.hpp"
#include "wgstokes/quadrature.hpp"
#include "wgstokes/taylor_hood.hpp"

using namespace wgstokes;

namespace {

const VectorField quad_u = [](const Eigen::Vector3d& x) {
  return Eigen::Vector3d(x[1] * x[1], x[0] * x[0], 0.0);
};
const MatrixField quad_grad = [](const Eigen::Vector3d& x) {
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  g(0, 1) = 2 * x[1];
  g(1, 0) = 2 * x[0];
  return g;
};
const ScalarField lin_p = [](const Eigen::Vector3d& x) { return x[0] + x[1] - 1.0; };
const VectorField quad_forcing = [](const Eigen::Vector3d&) {
  return Eigen::Vector3d(-1.0, -1.0, 0.0); // -laplace(u) + grad p at mu = 1
};

double pressure_mean(const TaylorHoodSystem& system, const Eigen::VectorXd& nodal_p) {
  const LagrangeSpace& ps = system.pressure_space();
  const SimplicialMesh& mesh = ps.mesh();
  const QuadRule ref = simplex_rule(2, 6);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const MappedRule rule = map_rule(ref, mesh.cell_vertex_matrix(c));
    const std::vector<std::int64_t>& pn = ps.cell_nodes(c);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::VectorXd sh = ps.shape(c, rule.points.col(q));
      double ph = 0.0;
      for (int i = 0; i < static_cast<int>(pn.size()); ++i) ph += nodal_p[pn[i]] * sh[i];
      sum += rule.weights[q] * ph;
    }
  }
  return sum;
}

double divergence_at_centroids(const TaylorHoodSystem& system, const Eigen::VectorXd& nodal_u) {
  const LagrangeSpace& vs = system.velocity_space();
  const SimplicialMesh& mesh = vs.mesh();
  const std::int64_t n = vs.num_nodes();
  double worst = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::MatrixXd sg = vs.shape_grad(c, mesh.cell_centroids[c]);
    const std::vector<std::int64_t>& vn = vs.cell_nodes(c);
    double div = 0.0;
    for (int comp = 0; comp < 2; ++comp)
      for (int i = 0; i < static_cast<int>(vn.size()); ++i)
        div += nodal_u[comp * n + vn[i]] * sg(i, comp);
    worst = std::max(worst, std::abs(div));
  }
  return worst;
}

} // namespace

TEST_CASE("polynomial solutions are reproduced to round-off") {
  for (int level : {2, 3}) {
    CAPTURE(level);
    const SimplicialMesh mesh = unit_square_mesh(level);
    StokesProblem problem;
    problem.mu = 1.0;
    problem.forcing = quad_forcing;
    problem.boundary_velocity = quad_u;
    const TaylorHoodSystem system(mesh, 2, problem);

    SolveReport report;
    const Eigen::VectorXd x = system.solve("direct", report);
    const Eigen::VectorXd u = system.full_velocity(x);
    const Eigen::VectorXd p = system.pressure(x);

    const TaylorHoodSystem::Errors err =
        system.measure_errors(u, p, quad_u, quad_grad, lin_p, 10);
    CHECK(err.velocity_l2 < 1e-12);
    CHECK(err.gradient < 1e-11);
    CHECK(err.pressure_l2 < 1e-12);
    CHECK(std::abs(system.multiplier(x)) < 1e-12);

    // Boundary nodes carry the nodal data exactly.
    const LagrangeSpace& vs = system.velocity_space();
    for (std::int64_t node : vs.boundary_nodes()) {
      const Eigen::Vector3d g = quad_u(vs.node(node));
      CHECK(u[node] == g[0]);
      CHECK(u[vs.num_nodes() + node] == g[1]);
    }
  }
}

TEST_CASE("errors shrink at the expected pace under refinement") {
  const ManufacturedCase mc = example_case(1);
  StokesProblem problem;
  problem.mu = 1.0;
  problem.forcing = mc.forcing(problem.mu);

  double prev_vel = 0.0, prev_press = 0.0;
  for (int level : {3, 4}) {
    const SimplicialMesh mesh = unit_square_mesh(level);
    const TaylorHoodSystem system(mesh, 2, problem);
    SolveReport report;
    const Eigen::VectorXd x = system.solve("direct", report);
    const TaylorHoodSystem::Errors err = system.measure_errors(
        system.full_velocity(x), system.pressure(x), mc.velocity, mc.velocity_gradient,
        mc.pressure, 14);
    if (level == 3) {
      prev_vel = err.velocity_l2;
      prev_press = err.pressure_l2;
    } else {
      // Third order in L2 for quadratic velocity, second for linear pressure.
      CHECK(prev_vel / err.velocity_l2 > 5.0);
      CHECK(prev_vel / err.velocity_l2 < 13.0);
      CHECK(prev_press / err.pressure_l2 > 2.5);
      CHECK(prev_press / err.pressure_l2 < 7.0);
    }
  }
}

TEST_CASE("velocity error scales exactly with inverse viscosity under gradient forcing") {
  // Forcing that is a pure pressure gradient: the conforming velocity error is
  // proportional to 1/mu — the lack of pressure robustness this family
  // documents. The discrete solutions themselves obey the scaling exactly.
  const ManufacturedCase mc = example_case(2);
  const SimplicialMesh mesh = unit_square_mesh(3);

  StokesProblem thick;
  thick.mu = 1.0;
  thick.forcing = mc.forcing(thick.mu);
  StokesProblem thin;
  thin.mu = 1e-3;
  thin.forcing = mc.forcing(thin.mu);

  const TaylorHoodSystem sys_thick(mesh, 2, thick);
  const TaylorHoodSystem sys_thin(mesh, 2, thin);
  SolveReport report;
  const Eigen::VectorXd x_thick = sys_thick.solve("direct", report);
  const Eigen::VectorXd x_thin = sys_thin.solve("direct", report);

  const Eigen::VectorXd u_thick = sys_thick.full_velocity(x_thick);
  const Eigen::VectorXd u_thin = sys_thin.full_velocity(x_thin);
  CHECK((u_thin - 1e3 * u_thick).norm() / u_thin.norm() < 1e-9);

  const Eigen::VectorXd p_thick = sys_thick.pressure(x_thick);
  const Eigen::VectorXd p_thin = sys_thin.pressure(x_thin);
  CHECK((p_thin - p_thick).norm() / p_thick.norm() < 1e-9);

  // And the discrete velocity is genuinely nonzero although the exact one is
  // zero — the effect is real, not a solver artifact.
  CHECK(u_thick.norm() > 1e-8);
}

TEST_CASE("discrete pressure has zero mean") {
  const ManufacturedCase mc = example_case(1);
  StokesProblem problem;
  problem.mu = 1.0;
  problem.forcing = mc.forcing(problem.mu);
  const SimplicialMesh mesh = unit_square_mesh(3);
  const TaylorHoodSystem system(mesh, 2, problem);
  SolveReport report;
  const Eigen::VectorXd x = system.solve("direct", report);
  CHECK(std::abs(pressure_mean(system, system.pressure(x))) < 1e-12);
}

TEST_CASE("conforming velocity is not divergence free") {
  // The reason the H(div) family exists: same problem, same refinement, but
  // the conforming solution carries O(1)-visible compressibility error.
  const ManufacturedCase mc = example_case(1);
  StokesProblem problem;
  problem.mu = 1.0;
  problem.forcing = mc.forcing(problem.mu);
  const SimplicialMesh mesh = unit_square_mesh(3);
  const TaylorHoodSystem system(mesh, 2, problem);
  SolveReport report;
  const Eigen::VectorXd u = system.full_velocity(system.solve("direct", report));
  CHECK(divergence_at_centroids(system, u) > 1e-4);
}

TEST_CASE("direct and minres solutions agree") {
  const ManufacturedCase mc = example_case(1);
  StokesProblem problem;
  problem.mu = 1.0;
  problem.forcing = mc.forcing(problem.mu);
  const SimplicialMesh mesh = unit_square_mesh(2);
  const TaylorHoodSystem system(mesh, 2, problem);

  SolveReport direct_report, minres_report;
  const Eigen::VectorXd xd = system.solve("direct", direct_report);
  const Eigen::VectorXd xm = system.solve("minres", minres_report);
  CHECK((xd - xm).norm() / xd.norm() < 1e-6);
}

TEST_CASE("unsupported configurations are rejected") {
  const SimplicialMesh cube = unit_cube_mesh(1);
  const SimplicialMesh square = unit_square_mesh(2);
  StokesProblem problem;
  problem.forcing = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };

  CHECK_THROWS_AS(TaylorHoodSystem(cube, 2, problem), ConfigError);
  CHECK_THROWS_AS(TaylorHoodSystem(square, 1, problem), ConfigError);
  CHECK_THROWS_AS(TaylorHoodSystem(square, 4, problem), ConfigError);

  StokesProblem no_forcing;
  CHECK_THROWS_AS(TaylorHoodSystem(square, 2, no_forcing), ConfigError);

  StokesProblem bad_mu = problem;
  bad_mu.mu = -1.0;
  CHECK_THROWS_AS(TaylorHoodSystem(square, 2, bad_mu), ConfigError);

  const TaylorHoodSystem system(square, 2, problem);
  SolveReport report;
  CHECK_THROWS_AS(system.solve("gmres", report), ConfigError);
}
