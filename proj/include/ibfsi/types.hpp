// Shared scalar and Eigen aliases for the ibfsi library.
#pragma once

#include <Eigen/Dense>

namespace ibfsi {

using Real = double;

using Vec2     = Eigen::Matrix<Real, 2, 1>;
using Mat2     = Eigen::Matrix<Real, 2, 2>;
using VecX     = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using MatX     = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
// Nodal coordinate/vector blocks: one row per node, columns are x1,x2.
using NodeArray = Eigen::Matrix<Real, Eigen::Dynamic, 2, Eigen::RowMajor>;

} // namespace ibfsi
