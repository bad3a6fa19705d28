#include "witness_forge/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "witness_forge/error.hpp"

namespace witness_forge {

double evaluate_polynomial(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<Complex> polynomial_roots(std::span<const double> coeffs) {
  double largest = 0.0;
  for (double c : coeffs) largest = std::max(largest, std::abs(c));
  if (largest == 0.0) fail(ErrorCode::InvalidArgument, "zero polynomial has no isolated roots");
  size_t degree = coeffs.size() - 1;
  while (degree > 0 && std::abs(coeffs[degree]) <= 1e-14 * largest) --degree;
  if (degree == 0) return {};

  // Frobenius companion matrix of the monic polynomial
  const auto n = static_cast<Eigen::Index>(degree);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -coeffs[static_cast<size_t>(i)] / coeffs[degree];

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<Complex> roots;
  roots.reserve(degree);
  for (Eigen::Index i = 0; i < n; ++i) roots.push_back(solver.eigenvalues()(i));
  return roots;
}

std::vector<double> real_polynomial_roots(std::span<const double> coeffs, double imag_tol) {
  std::vector<double> derivative;
  for (size_t k = 1; k < coeffs.size(); ++k) derivative.push_back(static_cast<double>(k) * coeffs[k]);

  std::vector<double> out;
  for (const Complex& z : polynomial_roots(coeffs)) {
    if (std::abs(z.imag()) >= imag_tol) continue;
    double x = z.real();
    for (int it = 0; it < 4; ++it) {
      const double d = evaluate_polynomial(derivative, x);
      if (d == 0.0) break;
      const double step = evaluate_polynomial(coeffs, x) / d;
      if (!std::isfinite(step)) break;
      // only accept steps that do not jump to a different root
      if (std::abs(step) > 1e-6 * (1.0 + std::abs(x))) break;
      x -= step;
    }
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace witness_forge
