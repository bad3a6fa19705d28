#pragma once

#include <span>
#include <vector>

#include "witness_forge/types.hpp"

namespace witness_forge {

/// All complex roots of sum_k c_k x^k (ascending coefficients) as eigenvalues
/// of the companion matrix. Leading coefficients below 1e-14 of the largest
/// are dropped first.
std::vector<Complex> polynomial_roots(std::span<const double> coeffs);

/// Roots with |Im| < imag_tol, polished by a few Newton steps on the
/// polynomial and returned in ascending order.
std::vector<double> real_polynomial_roots(std::span<const double> coeffs, double imag_tol = 1e-8);

double evaluate_polynomial(std::span<const double> coeffs, double x);

}  // namespace witness_forge
