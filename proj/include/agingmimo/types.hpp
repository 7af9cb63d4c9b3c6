#pragma once

#include <complex>

#include <Eigen/Dense>

namespace agingmimo {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;

}  // namespace agingmimo
