// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/examples.hpp"

#include <string>

#include "wgstokes/errors.hpp"

namespace wgstokes {

namespace {

// Building blocks of the 2D vortex: a vanishes to second order at 0 and 1,
// b = a', so the stream function a(x)a(y) gives a velocity with zero trace.
double fa(double t) { return (t - t * t) * (t - t * t); }
double fb(double t) { return 2.0 * (1.0 - 2.0 * t) * (t - t * t); } // a'
double fbp(double t) { return 2.0 * ((1.0 - 2.0 * t) * (1.0 - 2.0 * t) - 2.0 * (t - t * t)); } // a''
double fbpp(double t) { return -12.0 * (1.0 - 2.0 * t); } // a'''

ManufacturedCase vortex2d() {
  ManufacturedCase c;
  c.id = 1;
  c.dim = 2;
  c.homogeneous_boundary = true;
  c.velocity = [](const Eigen::Vector3d& p) {
    return Eigen::Vector3d(-fb(p.y()) * fa(p.x()), fb(p.x()) * fa(p.y()), 0.0);
  };
  c.velocity_gradient = [](const Eigen::Vector3d& p) {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 0) = -fb(p.y()) * fb(p.x());
    g(0, 1) = -fbp(p.y()) * fa(p.x());
    g(1, 0) = fbp(p.x()) * fa(p.y());
    g(1, 1) = fb(p.x()) * fb(p.y());
    return g;
  };
  c.pressure = [](const Eigen::Vector3d& p) { return fb(p.x()) * fb(p.y()); };
  c.neg_laplacian_u = [](const Eigen::Vector3d& p) {
    return Eigen::Vector3d(fb(p.y()) * fbp(p.x()) + fbpp(p.y()) * fa(p.x()),
                           -fbpp(p.x()) * fa(p.y()) - fb(p.x()) * fbp(p.y()), 0.0);
  };
  c.pressure_gradient = [](const Eigen::Vector3d& p) {
    return Eigen::Vector3d(fbp(p.x()) * fb(p.y()), fb(p.x()) * fbp(p.y()), 0.0);
  };
  return c;
}

ManufacturedCase gradient_forcing2d() {
  ManufacturedCase c;
  c.id = 2;
  c.dim = 2;
  c.homogeneous_boundary = true;
  c.velocity = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
  c.velocity_gradient = [](const Eigen::Vector3d&) { return Eigen::Matrix3d::Zero().eval(); };
  // p = (x - x^2)(x - 1/2), already zero-mean on the unit square.
  c.pressure = [](const Eigen::Vector3d& p) {
    return (p.x() - p.x() * p.x()) * (p.x() - 0.5);
  };
  c.neg_laplacian_u = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero(); };
  c.pressure_gradient = [](const Eigen::Vector3d& p) {
    return Eigen::Vector3d(3.0 * (p.x() - p.x() * p.x()) - 0.5, 0.0, 0.0);
  };
  return c;
}

ManufacturedCase quadratic3d() {
  ManufacturedCase c;
  c.id = 3;
  c.dim = 3;
  c.homogeneous_boundary = false;
  c.velocity = [](const Eigen::Vector3d& p) {
    return Eigen::Vector3d(p.y() * p.y(), p.z() * p.z(), p.x() * p.x());
  };
  c.velocity_gradient = [](const Eigen::Vector3d& p) {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 1) = 2.0 * p.y();
    g(1, 2) = 2.0 * p.z();
    g(2, 0) = 2.0 * p.x();
    return g;
  };
  // yz has mean 1/4 on the unit cube.
  c.pressure = [](const Eigen::Vector3d& p) { return p.y() * p.z() - 0.25; };
  c.neg_laplacian_u = [](const Eigen::Vector3d&) { return Eigen::Vector3d(-2.0, -2.0, -2.0); };
  c.pressure_gradient = [](const Eigen::Vector3d& p) {
    return Eigen::Vector3d(0.0, p.z(), p.y());
  };
  return c;
}

} // namespace

ManufacturedCase example_case(int id) {
  switch (id) {
    case 1: return vortex2d();
    case 2: return gradient_forcing2d();
    case 3: return quadratic3d();
    default:
      throw ConfigError("example_case: unknown example " + std::to_string(id) + " (have 1, 2, 3)");
  }
}

} // namespace wgstokes
