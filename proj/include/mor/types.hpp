#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace mor {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

}  // namespace mor
