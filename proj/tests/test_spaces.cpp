// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <string>

#include "wgstokes/errors.hpp"
#include "wgstokes/mesh.hpp"
#include "wgstokes/quadrature.hpp"
#include "wgstokes/spaces.hpp"

using namespace wgstokes;

namespace {

// Independent polynomial-space dimensions.
int np(int sdim, int m) {
  if (sdim == 1) return m + 1;
  if (sdim == 2) return (m + 1) * (m + 2) / 2;
  return (m + 1) * (m + 2) * (m + 3) / 6;
}

Eigen::VectorXd random_vector(std::int64_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(n);
  for (std::int64_t i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

// Quadrature points strictly inside a cell, for sampling evaluations.
Eigen::Matrix3Xd interior_points(const SimplicialMesh& mesh, int c) {
  return map_rule(simplex_rule(mesh.dim, 4), mesh.cell_vertex_matrix(c)).points;
}

} // namespace

TEST_CASE("DOF counts match the polynomial dimensions") {
  SimplicialMesh sq = unit_square_mesh(2);
  for (int k = 1; k <= 4; ++k) {
    HdivSpace v(sq, k, 2 * k + 2);
    CHECK(v.face_dofs() == k + 1);
    CHECK(v.coeffs_per_cell() == 2 * np(2, k));
    CHECK(v.interior_dofs() == 2 * np(2, k) - 3 * (k + 1));
    CHECK(v.total_dofs() ==
          (k + 1) * sq.num_faces() + std::int64_t(v.interior_dofs()) * sq.num_cells());
    PressureSpace w(sq, k);
    CHECK(w.per_cell() == np(2, k - 1));
    CHECK(w.total_dofs() == np(2, k - 1) * sq.num_cells());
  }

  SimplicialMesh cu = unit_cube_mesh(1);
  for (int k = 1; k <= 2; ++k) {
    HdivSpace v(cu, k, 2 * k + 2);
    CHECK(v.face_dofs() == np(2, k));
    CHECK(v.coeffs_per_cell() == 3 * np(3, k));
    CHECK(v.interior_dofs() == 3 * np(3, k) - 4 * np(2, k));
    PressureSpace w(cu, k);
    CHECK(w.per_cell() == np(3, k - 1));
  }
  // Spot values: the lowest orders have no interior DOFs, the next ones few.
  CHECK(HdivSpace(sq, 1, 4).interior_dofs() == 0);
  CHECK(HdivSpace(sq, 2, 6).interior_dofs() == 3);
  CHECK(HdivSpace(cu, 1, 4).interior_dofs() == 0);
  CHECK(HdivSpace(cu, 2, 6).interior_dofs() == 6);
}

TEST_CASE("boundary DOFs are exactly the boundary-face moments") {
  SimplicialMesh mesh = unit_square_mesh(3);
  HdivSpace v(mesh, 2, 8);
  int boundary_faces = 0;
  for (const auto& f : mesh.faces) boundary_faces += f.is_boundary() ? 1 : 0;
  CHECK(std::int64_t(v.boundary_dofs().size()) == std::int64_t(boundary_faces) * v.face_dofs());
  for (std::int64_t dof : v.boundary_dofs()) {
    const int f = static_cast<int>(dof / v.face_dofs());
    CHECK(mesh.faces[f].is_boundary());
  }
}

TEST_CASE("local Vandermonde and its inverse are consistent") {
  for (int k : {1, 2, 3, 4}) {
    SimplicialMesh mesh = unit_square_mesh(2);
    HdivSpace v(mesh, k, 2 * k + 2);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      Eigen::MatrixXd prod = v.dof_to_coeff(c) * v.coeff_to_dof(c);
      CHECK((prod - Eigen::MatrixXd::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff() <
            1e-10);
    }
  }
  SimplicialMesh mesh = unit_cube_mesh(1);
  HdivSpace v(mesh, 2, 6);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Eigen::MatrixXd prod = v.dof_to_coeff(c) * v.coeff_to_dof(c);
    CHECK((prod - Eigen::MatrixXd::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff() <
          1e-10);
  }
}

TEST_CASE("normal components are continuous across interior faces") {
  auto run = [](const SimplicialMesh& mesh, int k) {
    HdivSpace v(mesh, k, 2 * k + 4);
    Eigen::VectorXd w = random_vector(v.total_dofs(), 31u + static_cast<unsigned>(k));
    double max_tangential = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
      const Face& face = mesh.faces[f];
      if (face.is_boundary()) continue;
      MappedRule rule = map_rule(simplex_rule(mesh.dim - 1, k + 2), mesh.face_vertex_matrix(f));
      for (int q = 0; q < rule.size(); ++q) {
        const Eigen::Vector3d a = v.eval(w, face.owner, rule.points.col(q));
        const Eigen::Vector3d b = v.eval(w, face.neighbor, rule.points.col(q));
        const double scale = 1.0 + a.norm() + b.norm();
        CHECK(std::abs((a - b).dot(face.normal)) < 1e-9 * scale);
        max_tangential = std::max(max_tangential, ((a - b) - (a - b).dot(face.normal) * face.normal).norm());
      }
    }
    // Sanity: only the normal component is continuous, so the test would
    // notice a broken evaluation path.
    CHECK(max_tangential > 1e-3);
  };
  run(unit_square_mesh(3), 1);
  run(unit_square_mesh(3), 2);
  run(unit_cube_mesh(1), 2);
}

TEST_CASE("zeroing boundary DOFs kills the boundary normal trace") {
  SimplicialMesh mesh = unit_square_mesh(3);
  HdivSpace v(mesh, 2, 8);
  Eigen::VectorXd w = random_vector(v.total_dofs(), 99);
  for (std::int64_t dof : v.boundary_dofs()) w[dof] = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces[f];
    if (!face.is_boundary()) continue;
    MappedRule rule = map_rule(simplex_rule(1, 4), mesh.face_vertex_matrix(f));
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d a = v.eval(w, face.owner, rule.points.col(q));
      CHECK(std::abs(a.dot(face.normal)) < 1e-9 * (1.0 + a.norm()));
    }
  }
}

TEST_CASE("interpolation reproduces vector polynomials of full degree") {
  SUBCASE("2D quadratics") {
    SimplicialMesh mesh = unit_square_mesh(2);
    HdivSpace v(mesh, 2, 8);
    auto u = [](const Eigen::Vector3d& x) {
      return Eigen::Vector3d(x.x() * x.x() - 3.0 * x.x() * x.y() + 2.0 * x.y() - 1.0,
                             x.x() + x.y() * x.y() - 0.5 * x.x() * x.y(), 0.0);
    };
    Eigen::VectorXd dofs = v.interpolate(u, 8);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      Eigen::Matrix3Xd pts = interior_points(mesh, c);
      for (int q = 0; q < pts.cols(); ++q)
        CHECK((v.eval(dofs, c, pts.col(q)) - u(pts.col(q))).norm() < 1e-10);
    }
  }
  SUBCASE("3D quadratics with divergence check") {
    SimplicialMesh mesh = unit_cube_mesh(1);
    HdivSpace v(mesh, 2, 8);
    auto u = [](const Eigen::Vector3d& x) {
      return Eigen::Vector3d(x.y() * x.y() + x.x() - x.z(),
                             x.z() * x.z() - 2.0 * x.y() + 1.0,
                             x.x() * x.x() + x.x() * x.y() - 3.0);
    };
    // div u = 1 - 2 + 0 = -1
    Eigen::VectorXd dofs = v.interpolate(u, 8);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      Eigen::Matrix3Xd pts = interior_points(mesh, c);
      for (int q = 0; q < pts.cols(); ++q) {
        CHECK((v.eval(dofs, c, pts.col(q)) - u(pts.col(q))).norm() < 1e-10);
        CHECK(v.eval_divergence(dofs, c, pts.col(q)) == doctest::Approx(-1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("interpolation preserves elementwise divergence moments") {
  // The defining property of the interpolant beyond its face moments:
  // (div(v - Pi v), q)_T = 0 for q of one degree below the space. Verified
  // against plain quadrature of div v, which never sees the interpolant.
  auto check = [](const SimplicialMesh& mesh, int k, const VectorField& u,
                  const ScalarField& divu) {
    HdivSpace v(mesh, k, 16);
    Eigen::VectorXd dofs = v.interpolate(u, 16);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      ScalarBasis q(mesh.cell_vertex_matrix(c), k - 1);
      MappedRule rule = map_rule(simplex_rule(mesh.dim, 18), mesh.cell_vertex_matrix(c));
      Eigen::VectorXd lhs = Eigen::VectorXd::Zero(q.size());
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(q.size());
      for (int p = 0; p < rule.size(); ++p) {
        const Eigen::Vector3d x = rule.points.col(p);
        lhs += rule.weights[p] * v.eval_divergence(dofs, c, x) * q.eval(x);
        rhs += rule.weights[p] * divu(x) * q.eval(x);
      }
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
  };

  auto u2 = [](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(std::sin(x.x() + 2.0 * x.y()), std::cos(x.x() - x.y()), 0.0);
  };
  auto divu2 = [](const Eigen::Vector3d& x) {
    return std::cos(x.x() + 2.0 * x.y()) + std::sin(x.x() - x.y());
  };
  check(unit_square_mesh(2), 2, u2, divu2);
  check(unit_square_mesh(2), 3, u2, divu2);

  auto u3 = [](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(std::sin(x.z()), std::sin(x.x()), std::sin(x.y()));
  };
  check(unit_cube_mesh(1), 2, u3, [](const Eigen::Vector3d&) { return 0.0; });
}

TEST_CASE("face DOFs are the face moments of the interpolated field") {
  // Evaluating the interpolant on the owner cell and integrating against the
  // face basis must give back the stored DOF values: the local Vandermonde's
  // top rows really are the face-moment functionals.
  SimplicialMesh mesh = unit_square_mesh(2);
  HdivSpace v(mesh, 3, 14);
  auto u = [](const Eigen::Vector3d& x) {
    return Eigen::Vector3d(std::sin(x.x()) * x.y(), std::exp(x.x() - x.y()), 0.0);
  };
  Eigen::VectorXd dofs = v.interpolate(u, 14);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    MappedRule rule = map_rule(simplex_rule(1, 2 * v.degree() + 2), mesh.face_vertex_matrix(f));
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(v.face_dofs());
    for (int q = 0; q < rule.size(); ++q)
      moments += rule.weights[q] *
                 v.eval(dofs, mesh.faces[f].owner, rule.points.col(q)).dot(mesh.faces[f].normal) *
                 v.face_basis(f).eval(rule.points.col(q));
    CHECK((moments - dofs.segment(v.face_offset(f), v.face_dofs())).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("pressure projection reproduces its own span and the mean row") {
  SimplicialMesh mesh = unit_square_mesh(2);
  PressureSpace w(mesh, 3); // degree-2 pressures
  auto p = [](const Eigen::Vector3d& x) { return x.x() * x.x() - x.y() + 0.25 * x.x() * x.y(); };
  Eigen::VectorXd coeffs = w.project(p, 8);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    Eigen::Matrix3Xd pts = interior_points(mesh, c);
    for (int q = 0; q < pts.cols(); ++q)
      CHECK(w.eval(coeffs, c, pts.col(q)) == doctest::Approx(p(pts.col(q))).epsilon(1e-11));
  }
  // mean_row . coeffs = integral of the represented function
  Eigen::VectorXd ones = w.mean_row(8);
  double integral = 0.0;
  MappedRule rule;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    rule = map_rule(simplex_rule(2, 8), mesh.cell_vertex_matrix(c));
    for (int q = 0; q < rule.size(); ++q) integral += rule.weights[q] * p(rule.points.col(q));
  }
  CHECK(ones.dot(coeffs) == doctest::Approx(integral).epsilon(1e-12));
}

TEST_CASE("degenerate cells are reported by name") {
  SimplicialMesh mesh;
  mesh.dim = 2;
  mesh.level = 1;
  mesh.vertices = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0),
                   Eigen::Vector3d(0.5, 1e-14, 0)};
  mesh.cells = {{{0, 1, 2, -1}}};
  build_face_connectivity(mesh);
  try {
    HdivSpace v(mesh, 2, 6);
    FAIL("expected NumericError");
  } catch (const NumericError& err) {
    CHECK(std::string(err.what()).find("cell") != std::string::npos);
  }
}
