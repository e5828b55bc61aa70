#pragma once

#include <Eigen/Dense>

namespace newton3 {

using dvec = Eigen::VectorXd;
using dmat = Eigen::MatrixXd;

}  // namespace newton3
