// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "wgstokes/assembly.hpp"
#include "wgstokes/errors.hpp"
#include "wgstokes/mesh.hpp"
#include "wgstokes/postproc.hpp"
#include "wgstokes/spaces.hpp"

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

SaddleSystem zero_forcing_system(const HdivSpace& v, const PressureSpace& w, double mu) {
  StokesProblem problem;
  problem.mu = mu;
  problem.forcing = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
  return SaddleSystem(v, w, problem);
}

} // namespace

TEST_CASE("all error measures vanish on an exactly representable pair") {
  const SimplicialMesh mesh = unit_square_mesh(3);
  const HdivSpace velocity(mesh, 2, 10);
  const PressureSpace pressure(mesh, 2);

  const Eigen::VectorXd u = velocity.interpolate(quad_u, 12);
  const Eigen::VectorXd p = pressure.project(lin_p, 12);

  // The data lifting must be fed for the boundary cells' weak gradients to
  // see the full trace; with it, a polynomial pair is exact.
  const HdivErrors err =
      measure_errors(velocity, pressure, u, p, quad_u, quad_grad, lin_p, quad_u, 14);
  CHECK(err.velocity_l2 < 1e-12);
  CHECK(err.energy < 1e-11);
  CHECK(err.pressure_l2 < 1e-12);
  CHECK(err.divergence_sup < 1e-11);
}

TEST_CASE("error magnitudes match closed forms against the zero solution") {
  const SimplicialMesh mesh = unit_square_mesh(3);
  const HdivSpace velocity(mesh, 2, 10);
  const PressureSpace pressure(mesh, 2);

  const Eigen::VectorXd u = Eigen::VectorXd::Zero(velocity.total_dofs());
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(pressure.total_dofs());

  // No boundary data: the measured energy is the norm of the projected exact
  // gradient, which the degree-(k+1) tensor space holds exactly here.
  const HdivErrors err =
      measure_errors(velocity, pressure, u, p, quad_u, quad_grad, lin_p, VectorField{}, 14);

  // || (y^2, x^2) ||^2   = 2/5,
  // || grad ||_F^2       = int (2y)^2 + (2x)^2 = 8/3,
  // || x + y - 1 ||^2    = 1/6   on the unit square.
  CHECK(err.velocity_l2 == doctest::Approx(std::sqrt(0.4)).epsilon(1e-12));
  CHECK(err.energy == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-12));
  CHECK(err.pressure_l2 == doctest::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-12));
  CHECK(err.divergence_sup == 0.0);
}

TEST_CASE("interpolants of solenoidal fields are pointwise divergence free") {
  // Not just small moments: div of the interpolant lives in the very space
  // its moments are matched against, so it must vanish identically.
  const double pi = std::acos(-1.0);

  const VectorField swirl2d = [pi](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(pi * std::sin(pi * x[0]) * std::cos(pi * x[1]),
                           -pi * std::cos(pi * x[0]) * std::sin(pi * x[1]), 0.0);
  };
  const SimplicialMesh square = unit_square_mesh(3);
  for (int k : {1, 2, 3}) {
    CAPTURE(k);
    const HdivSpace velocity(square, k, 2 * k + 8);
    const Eigen::VectorXd u = velocity.interpolate(swirl2d, 16);
    CHECK(divergence_sup(velocity, u, 2 * k + 4) < 1e-10);
  }

  const VectorField swirl3d = [pi](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(std::sin(pi * x[1]), std::sin(pi * x[2]), std::sin(pi * x[0]));
  };
  const SimplicialMesh cube = unit_cube_mesh(2);
  const HdivSpace velocity(cube, 2, 12);
  const Eigen::VectorXd u = velocity.interpolate(swirl3d, 14);
  CHECK(divergence_sup(velocity, u, 10) < 1e-10);
}

TEST_CASE("inf-sup estimate agrees with an independent dense route") {
  const SimplicialMesh mesh = unit_square_mesh(2);
  const HdivSpace velocity(mesh, 1, 8);
  const PressureSpace pressure(mesh, 1);
  const SaddleSystem system = zero_forcing_system(velocity, pressure, 1.0);

  const double beta = infsup_estimate(system);
  CHECK(beta > 0.0);

  // Oracle: beta = smallest singular value of L^{-1} D^T Z with A = L L^T and
  // Z an SVD-built basis of the zero-mean pressure subspace — Cholesky + SVD
  // instead of LDLT + symmetric eigensolver.
  const Eigen::MatrixXd a = Eigen::MatrixXd(system.a_block());
  const Eigen::MatrixXd d = Eigen::MatrixXd(system.d_block());
  const Eigen::VectorXd c = system.mean_row();
  const Eigen::Index np = d.rows();

  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  REQUIRE(llt.info() == Eigen::Success);
  const Eigen::JacobiSVD<Eigen::MatrixXd> csvd(c.transpose(), Eigen::ComputeFullV);
  const Eigen::MatrixXd z = csvd.matrixV().rightCols(np - 1);
  const Eigen::MatrixXd ldz =
      llt.matrixL().solve(Eigen::MatrixXd(d.transpose() * z));
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(ldz);
  const double beta_oracle = svd.singularValues().minCoeff();

  CHECK(beta == doctest::Approx(beta_oracle).epsilon(1e-9));
}

TEST_CASE("inf-sup estimate is viscosity independent and mesh stable") {
  double beta_prev = 0.0;
  for (int level : {2, 3, 4}) {
    CAPTURE(level);
    const SimplicialMesh mesh = unit_square_mesh(level);
    const HdivSpace velocity(mesh, 1, 8);
    const PressureSpace pressure(mesh, 1);
    const double beta = infsup_estimate(zero_forcing_system(velocity, pressure, 1.0));
    CHECK(beta > 0.05);
    if (level > 2) {
      // Uniform refinement of a shape-regular mesh must not drain stability.
      CHECK(beta > 0.75 * beta_prev);
    }
    beta_prev = beta;

    if (level == 2) {
      const double beta_thin = infsup_estimate(zero_forcing_system(velocity, pressure, 1e-6));
      CHECK(beta_thin == doctest::Approx(beta).epsilon(1e-9));
    }
  }
}

TEST_CASE("malformed inputs are rejected") {
  const SimplicialMesh mesh = unit_square_mesh(2);
  const HdivSpace velocity(mesh, 1, 8);
  const PressureSpace pressure(mesh, 1);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(velocity.total_dofs());
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(pressure.total_dofs());

  CHECK_THROWS_AS(measure_errors(velocity, pressure, u.head(3), p, quad_u, quad_grad, lin_p,
                                 VectorField{}, 10),
                  ConfigError);
  CHECK_THROWS_AS(measure_errors(velocity, pressure, u, p.head(1), quad_u, quad_grad, lin_p,
                                 VectorField{}, 10),
                  ConfigError);
  CHECK_THROWS_AS(measure_errors(velocity, pressure, u, p, VectorField{}, quad_grad, lin_p,
                                 VectorField{}, 10),
                  ConfigError);
  CHECK_THROWS_AS(divergence_sup(velocity, u.head(2), 8), ConfigError);

  const SimplicialMesh other = unit_square_mesh(3);
  const PressureSpace other_pressure(other, 1);
  const Eigen::VectorXd po = Eigen::VectorXd::Zero(other_pressure.total_dofs());
  CHECK_THROWS_AS(measure_errors(velocity, other_pressure, u, po, quad_u, quad_grad, lin_p,
                                 VectorField{}, 10),
                  ConfigError);
}
