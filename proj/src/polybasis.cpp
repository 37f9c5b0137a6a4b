// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/polybasis.hpp"

#include <cmath>
#include <limits>

#include "wgstokes/errors.hpp"
#include "wgstokes/quadrature.hpp"

namespace wgstokes {

namespace {

/// Multi-indices of total degree <= m over `sdim` variables, graded then
/// lexicographic — a fixed order so bases are reproducible.
std::vector<std::array<int, 3>> monomial_exponents(int sdim, int m) {
  std::vector<std::array<int, 3>> exps;
  for (int t = 0; t <= m; ++t) {
    if (sdim == 1) {
      exps.push_back({{t, 0, 0}});
    } else if (sdim == 2) {
      for (int i = t; i >= 0; --i) exps.push_back({{i, t - i, 0}});
    } else {
      for (int i = t; i >= 0; --i)
        for (int j = t - i; j >= 0; --j) exps.push_back({{i, j, t - i - j}});
    }
  }
  return exps;
}

} // namespace

ScalarBasis::ScalarBasis(const Eigen::Matrix3Xd& vertices, int degree, std::string entity) {
  if (degree < 0 || degree > 8)
    throw ConfigError("ScalarBasis: degree must be in [0,8], got " + std::to_string(degree));
  sdim_ = static_cast<int>(vertices.cols()) - 1;
  if (sdim_ < 1 || sdim_ > 3) throw ConfigError("ScalarBasis: need 2..4 vertices");
  verts_ = vertices;
  degree_ = degree;
  exps_ = monomial_exponents(sdim_, degree);

  centroid_ = verts_.rowwise().mean();
  scale_ = 0.0;
  for (int a = 0; a <= sdim_; ++a)
    for (int b = a + 1; b <= sdim_; ++b)
      scale_ = std::max(scale_, (verts_.col(a) - verts_.col(b)).norm());
  if (!(scale_ > 0.0))
    throw NumericError("ScalarBasis: zero-diameter simplex" +
                       (entity.empty() ? std::string() : " on " + entity));

  // Orthonormal tangent frame from the edge vectors (Gram–Schmidt in fixed
  // order). For full-dimensional cells this spans the ambient axes; for faces
  // it spans the face plane.
  frame_.resize(3, sdim_);
  for (int j = 0; j < sdim_; ++j) {
    Eigen::Vector3d e = verts_.col(j + 1) - verts_.col(0);
    for (int i = 0; i < j; ++i) e -= frame_.col(i).dot(e) * frame_.col(i);
    const double len = e.norm();
    if (len < 1e-12 * scale_)
      throw NumericError("ScalarBasis: degenerate simplex" +
                         (entity.empty() ? std::string() : " on " + entity));
    frame_.col(j) = e / len;
  }

  // Exact Gram data: rule of degree 2m on this simplex.
  MappedRule rule = map_rule(simplex_rule(sdim_, 2 * degree), verts_);
  const int n = size();
  Eigen::MatrixXd E(rule.size(), n);
  for (int q = 0; q < rule.size(); ++q)
    E.row(q) = std::sqrt(rule.weights[q]) * monomials_at(rule.points.col(q)).transpose();

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(E);
  Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  // Positive-diagonal convention fixes the QR sign ambiguity.
  for (int j = 0; j < n; ++j)
    if (R(j, j) < 0.0) R.row(j) = -R.row(j);

  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    dmax = std::max(dmax, R(j, j));
    dmin = std::min(dmin, R(j, j));
  }
  if (!(dmin > 0.0) || dmax / dmin > 1e12)
    throw NumericError("ScalarBasis: monomials numerically dependent" +
                       (entity.empty() ? std::string() : " on " + entity));

  coeff_ = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
}

Eigen::VectorXd ScalarBasis::monomials_at(const Eigen::Vector3d& x) const {
  // Local coordinates and power tables up to the degree.
  std::array<std::array<double, 9>, 3> pw{};
  for (int d = 0; d < sdim_; ++d) {
    const double xi = frame_.col(d).dot(x - centroid_) / scale_;
    pw[d][0] = 1.0;
    for (int e = 1; e <= degree_; ++e) pw[d][e] = pw[d][e - 1] * xi;
  }
  Eigen::VectorXd mono(size());
  for (int i = 0; i < size(); ++i) {
    double v = pw[0][exps_[i][0]];
    if (sdim_ > 1) v *= pw[1][exps_[i][1]];
    if (sdim_ > 2) v *= pw[2][exps_[i][2]];
    mono[i] = v;
  }
  return mono;
}

Eigen::VectorXd ScalarBasis::eval(const Eigen::Vector3d& x) const {
  return coeff_.transpose() * monomials_at(x);
}

Eigen::MatrixXd ScalarBasis::eval_many(const Eigen::Matrix3Xd& pts) const {
  Eigen::MatrixXd vals(size(), pts.cols());
  for (int q = 0; q < pts.cols(); ++q) vals.col(q) = eval(pts.col(q));
  return vals;
}

Eigen::MatrixXd ScalarBasis::eval_grad(const Eigen::Vector3d& x) const {
  std::array<std::array<double, 9>, 3> pw{};
  for (int d = 0; d < sdim_; ++d) {
    const double xi = frame_.col(d).dot(x - centroid_) / scale_;
    pw[d][0] = 1.0;
    for (int e = 1; e <= degree_; ++e) pw[d][e] = pw[d][e - 1] * xi;
  }
  // Gradients of monomials in local coordinates, then chain rule through the
  // frame: d xi_d / d x = frame.col(d) / scale.
  Eigen::MatrixXd gmono(size(), sdim_);
  for (int i = 0; i < size(); ++i) {
    for (int d = 0; d < sdim_; ++d) {
      const int e = exps_[i][d];
      if (e == 0) {
        gmono(i, d) = 0.0;
        continue;
      }
      double v = e * pw[d][e - 1];
      for (int o = 0; o < sdim_; ++o)
        if (o != d) v *= pw[o][exps_[i][o]];
      gmono(i, d) = v;
    }
  }
  return coeff_.transpose() * gmono * (frame_.transpose() / scale_);
}

Eigen::VectorXd ScalarBasis::project(const ScalarField& f, int quad_degree) const {
  MappedRule rule = map_rule(simplex_rule(sdim_, quad_degree), verts_);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(size());
  for (int q = 0; q < rule.size(); ++q)
    c += rule.weights[q] * f(rule.points.col(q)) * eval(rule.points.col(q));
  return c;
}

Eigen::MatrixXd ScalarBasis::gram(int quad_degree) const {
  MappedRule rule = map_rule(simplex_rule(sdim_, quad_degree), verts_);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size(), size());
  for (int q = 0; q < rule.size(); ++q) {
    Eigen::VectorXd v = eval(rule.points.col(q));
    g += rule.weights[q] * v * v.transpose();
  }
  return g;
}

} // namespace wgstokes
