// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "wgstokes/errors.hpp"
#include "wgstokes/examples.hpp"
#include "wgstokes/mesh.hpp"
#include "wgstokes/quadrature.hpp"

using namespace wgstokes;

namespace {

// Interior sample points, kept away from the boundary so centered stencils
// never step outside the domain.
std::vector<Eigen::Vector3d> interior_points(int dim, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coord(0.06, 0.94);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < count; ++i) {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    for (int d = 0; d < dim; ++d) x[d] = coord(rng);
    pts.push_back(x);
  }
  return pts;
}

Eigen::Matrix3d fd_gradient(const VectorField& u, const Eigen::Vector3d& x, int dim) {
  const double h = 1e-6;
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  for (int j = 0; j < dim; ++j) {
    Eigen::Vector3d xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Eigen::Vector3d du = (u(xp) - u(xm)) / (2 * h);
    for (int i = 0; i < 3; ++i) g(i, j) = du[i];
  }
  return g;
}

Eigen::Vector3d fd_neg_laplacian(const VectorField& u, const Eigen::Vector3d& x, int dim) {
  const double h = 1e-4;
  Eigen::Vector3d lap = Eigen::Vector3d::Zero();
  const Eigen::Vector3d u0 = u(x);
  for (int j = 0; j < dim; ++j) {
    Eigen::Vector3d xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    lap += (u(xp) - 2 * u0 + u(xm)) / (h * h);
  }
  return -lap;
}

Eigen::Vector3d fd_scalar_gradient(const ScalarField& p, const Eigen::Vector3d& x, int dim) {
  const double h = 1e-6;
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  for (int j = 0; j < dim; ++j) {
    Eigen::Vector3d xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (p(xp) - p(xm)) / (2 * h);
  }
  return g;
}

double domain_integral(const ScalarField& f, const SimplicialMesh& mesh, int degree) {
  const QuadRule ref = simplex_rule(mesh.dim, degree);
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const MappedRule rule = map_rule(ref, mesh.cell_vertex_matrix(c));
    for (int q = 0; q < rule.size(); ++q) sum += rule.weights[q] * f(rule.points.col(q));
  }
  return sum;
}

} // namespace

TEST_CASE("catalog fields are internally consistent") {
  for (int id : {1, 2, 3}) {
    CAPTURE(id);
    const ManufacturedCase mc = example_case(id);
    CHECK(mc.id == id);
    CHECK((mc.dim == 2 || mc.dim == 3));

    for (const Eigen::Vector3d& x : interior_points(mc.dim, 25, 1000 + id)) {
      // Stored gradient against centered differences of the velocity.
      const Eigen::Matrix3d g = mc.velocity_gradient(x);
      const Eigen::Matrix3d gfd = fd_gradient(mc.velocity, x, mc.dim);
      CHECK((g - gfd).topLeftCorner(mc.dim, mc.dim).cwiseAbs().maxCoeff() < 1e-6);

      // Incompressibility, twice: trace of the stored gradient, and of the
      // differenced one.
      double tr = 0.0, trfd = 0.0;
      for (int d = 0; d < mc.dim; ++d) {
        tr += g(d, d);
        trfd += gfd(d, d);
      }
      CHECK(std::abs(tr) < 1e-13);
      CHECK(std::abs(trfd) < 1e-6);

      // Viscous term against a second-difference stencil.
      const Eigen::Vector3d nl = mc.neg_laplacian_u(x);
      CHECK((nl - fd_neg_laplacian(mc.velocity, x, mc.dim)).norm() < 1e-4);

      // Pressure gradient against centered differences of the pressure.
      const Eigen::Vector3d pg = mc.pressure_gradient(x);
      CHECK((pg - fd_scalar_gradient(mc.pressure, x, mc.dim)).norm() < 1e-6);

      // The forcing splits exactly into its two stored parts.
      for (double mu : {1.0, 1e-6, 3.75}) {
        const Eigen::Vector3d f = mc.forcing(mu)(x);
        CHECK((f - (mu * nl + pg)).norm() < 1e-15);
      }
    }
  }
}

TEST_CASE("pressures have zero mean over the domain") {
  const ManufacturedCase c1 = example_case(1);
  const ManufacturedCase c2 = example_case(2);
  const ManufacturedCase c3 = example_case(3);
  const SimplicialMesh square = unit_square_mesh(4);
  const SimplicialMesh cube = unit_cube_mesh(2);
  CHECK(std::abs(domain_integral(c1.pressure, square, 8)) < 1e-13);
  CHECK(std::abs(domain_integral(c2.pressure, square, 8)) < 1e-13);
  CHECK(std::abs(domain_integral(c3.pressure, cube, 6)) < 1e-13);
}

TEST_CASE("boundary traces match the homogeneity flag") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> t(0.0, 1.0);

  for (int id : {1, 2}) {
    const ManufacturedCase mc = example_case(id);
    REQUIRE(mc.dim == 2);
    CHECK(mc.homogeneous_boundary);
    for (int i = 0; i < 40; ++i) {
      const double s = t(rng);
      CHECK(mc.velocity({s, 0.0, 0.0}).norm() < 1e-14);
      CHECK(mc.velocity({s, 1.0, 0.0}).norm() < 1e-14);
      CHECK(mc.velocity({0.0, s, 0.0}).norm() < 1e-14);
      CHECK(mc.velocity({1.0, s, 0.0}).norm() < 1e-14);
    }
  }

  const ManufacturedCase mc3 = example_case(3);
  CHECK_FALSE(mc3.homogeneous_boundary);
  // The trace really is nonzero somewhere, so the flag is load-bearing.
  CHECK(mc3.velocity({0.0, 0.5, 0.5}).norm() > 0.1);
}

TEST_CASE("unknown case ids are rejected") {
  CHECK_THROWS_AS(example_case(0), ConfigError);
  CHECK_THROWS_AS(example_case(4), ConfigError);
  CHECK_THROWS_AS(example_case(-1), ConfigError);
}
