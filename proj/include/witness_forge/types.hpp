#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace witness_forge {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;

/// Phase of z, with arg(0) := 0.
inline double phase_of(Complex z) {
  return (z == Complex{0.0, 0.0}) ? 0.0 : std::arg(z);
}

}  // namespace witness_forge
