// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <functional>

namespace wgstokes {

using ScalarField = std::function<double(const Eigen::Vector3d&)>;
using VectorField = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;
/// Jacobian convention: G(i,j) = d u_i / d x_j.
using MatrixField = std::function<Eigen::Matrix3d(const Eigen::Vector3d&)>;

} // namespace wgstokes
