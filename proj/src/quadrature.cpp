// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/quadrature.hpp"

#include <cmath>
#include <string>

#include "wgstokes/errors.hpp"

namespace wgstokes {

namespace {

/// Gauss–Legendre nodes/weights on [0,1], exact through degree 2n-1.
/// Newton iteration on P_n with the Chebyshev-based initial guess; this is the
/// textbook construction and is fully deterministic.
void gauss_legendre_01(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    // root of P_n on (-1,1), counted from the right
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // evaluate P_n(t) and P_n'(t) by the three-term recurrence
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 + t);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp); // = 0.5 * 2/((1-t^2) P_n'^2)
  }
}

int points_for_degree(int degree) { return degree / 2 + 1; } // 2n-1 >= degree

} // namespace

QuadRule simplex_rule(int dim, int degree) {
  if (dim < 1 || dim > 3)
    throw ConfigError("simplex_rule: dim must be 1, 2 or 3, got " + std::to_string(dim));
  if (degree < 0 || degree > 20)
    throw ConfigError("simplex_rule: degree must be in [0,20], got " + std::to_string(degree));

  QuadRule rule;
  rule.dim = dim;
  rule.exact_degree = degree;

  if (dim == 1) {
    Eigen::VectorXd x, w;
    gauss_legendre_01(points_for_degree(degree), x, w);
    const int n = static_cast<int>(x.size());
    rule.points.resize(n, 2);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      rule.points(i, 0) = 1.0 - x[i];
      rule.points(i, 1) = x[i];
      rule.weights[i] = w[i];
    }
    return rule;
  }

  if (dim == 2) {
    // Collapse of the square: x = u, y = v(1-u), Jacobian (1-u). A monomial
    // x^a y^b with a+b <= degree becomes a polynomial of degree a+b+1 in u and
    // b in v, so exactness needs degree+1 in u and degree in v.
    Eigen::VectorXd xu, wu, xv, wv;
    gauss_legendre_01(points_for_degree(degree + 1), xu, wu);
    gauss_legendre_01(points_for_degree(degree), xv, wv);
    const int n = static_cast<int>(xu.size() * xv.size());
    rule.points.resize(n, 3);
    rule.weights.resize(n);
    int q = 0;
    for (int i = 0; i < xu.size(); ++i)
      for (int j = 0; j < xv.size(); ++j, ++q) {
        const double x = xu[i];
        const double y = xv[j] * (1.0 - xu[i]);
        rule.points(q, 0) = 1.0 - x - y;
        rule.points(q, 1) = x;
        rule.points(q, 2) = y;
        rule.weights[q] = wu[i] * wv[j] * (1.0 - xu[i]);
      }
    return rule;
  }

  // dim == 3. x = u, y = v(1-u), z = w(1-u)(1-v), Jacobian (1-u)^2 (1-v);
  // u-degree a+b+c+2, v-degree b+c+1, w-degree c.
  Eigen::VectorXd xu, wu, xv, wv, xw, ww;
  gauss_legendre_01(points_for_degree(degree + 2), xu, wu);
  gauss_legendre_01(points_for_degree(degree + 1), xv, wv);
  gauss_legendre_01(points_for_degree(degree), xw, ww);
  const int n = static_cast<int>(xu.size() * xv.size() * xw.size());
  rule.points.resize(n, 4);
  rule.weights.resize(n);
  int q = 0;
  for (int i = 0; i < xu.size(); ++i)
    for (int j = 0; j < xv.size(); ++j)
      for (int k = 0; k < xw.size(); ++k, ++q) {
        const double x = xu[i];
        const double y = xv[j] * (1.0 - xu[i]);
        const double z = xw[k] * (1.0 - xu[i]) * (1.0 - xv[j]);
        rule.points(q, 0) = 1.0 - x - y - z;
        rule.points(q, 1) = x;
        rule.points(q, 2) = y;
        rule.points(q, 3) = z;
        rule.weights[q] = wu[i] * wv[j] * ww[k] * (1.0 - xu[i]) * (1.0 - xu[i]) * (1.0 - xv[j]);
      }
  return rule;
}

double simplex_measure(const Eigen::Matrix3Xd& vertices) {
  const int d = static_cast<int>(vertices.cols()) - 1;
  Eigen::Matrix3Xd edges(3, d);
  for (int j = 0; j < d; ++j) edges.col(j) = vertices.col(j + 1) - vertices.col(0);
  // Gram determinant handles simplices embedded in a higher-dimensional space.
  Eigen::MatrixXd gram = edges.transpose() * edges;
  double det = gram.determinant();
  if (det < 0.0) det = 0.0;
  double factorial = 1.0;
  for (int j = 2; j <= d; ++j) factorial *= j;
  return std::sqrt(det) / factorial;
}

MappedRule map_rule(const QuadRule& rule, const Eigen::Matrix3Xd& vertices) {
  const int d = rule.dim;
  if (vertices.cols() != d + 1)
    throw ConfigError("map_rule: expected " + std::to_string(d + 1) + " vertices, got " +
                      std::to_string(vertices.cols()));

  const double measure = simplex_measure(vertices);
  double diam = 0.0;
  for (int a = 0; a <= d; ++a)
    for (int b = a + 1; b <= d; ++b)
      diam = std::max(diam, (vertices.col(a) - vertices.col(b)).norm());
  if (!(measure > 1e-12 * std::pow(diam, d)))
    throw NumericError("map_rule: degenerate simplex (measure " + std::to_string(measure) + ")");

  double ref_measure = 1.0;
  for (int j = 2; j <= d; ++j) ref_measure /= j;

  MappedRule mapped;
  mapped.points = vertices * rule.points.transpose(); // barycentric interpolation
  mapped.weights = rule.weights * (measure / ref_measure);
  return mapped;
}

} // namespace wgstokes
