#include "witness_forge/quadrature.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "witness_forge/error.hpp"

namespace witness_forge {

namespace {

// Orthonormal Hermite polynomials for the weight exp(-x^2):
// p_0 = pi^(-1/4), p_{k+1} = x sqrt(2/(k+1)) p_k - sqrt(k/(k+1)) p_{k-1}.
// Returns p_{n-1}(x), p_n(x) and sum_{k<n} p_k(x)^2.
struct HermiteEval {
  double prev;
  double last;
  double sum_sq;
};

HermiteEval orthonormal_hermite(int n, double x) {
  double p_prev = 0.0;
  double p = std::pow(std::numbers::pi, -0.25);
  double sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    sum_sq += p * p;
    const double next = x * std::sqrt(2.0 / (k + 1)) * p - std::sqrt(static_cast<double>(k) / (k + 1)) * p_prev;
    p_prev = p;
    p = next;
  }
  return {p_prev, p, sum_sq};
}

}  // namespace

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {}

QuadratureRule QuadratureRule::gauss_hermite(int order) {
  if (order < 1) fail(ErrorCode::InvalidArgument, "quadrature order must be >= 1, got " + std::to_string(order));
  // Golub-Welsch: eigenvalues of the symmetric Jacobi matrix are the nodes.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    J(k - 1, k) = J(k, k - 1) = std::sqrt(k / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
  std::vector<double> nodes(static_cast<size_t>(order));
  std::vector<double> weights(static_cast<size_t>(order));
  for (int i = 0; i < order; ++i) {
    double x = es.eigenvalues()(i);
    // p_n'(x) = sqrt(2n) p_{n-1}(x)
    for (int it = 0; it < 8; ++it) {
      const HermiteEval h = orthonormal_hermite(order, x);
      const double deriv = std::sqrt(2.0 * order) * h.prev;
      if (deriv == 0.0) break;
      const double step = h.last / deriv;
      x -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    nodes[static_cast<size_t>(i)] = x;
    weights[static_cast<size_t>(i)] = 1.0 / orthonormal_hermite(order, x).sum_sq;
  }
  // symmetrize against rounding
  for (int i = 0; i < order / 2; ++i) {
    const auto lo = static_cast<size_t>(i);
    const auto hi = static_cast<size_t>(order - 1 - i);
    const double x = 0.5 * (nodes[hi] - nodes[lo]);
    const double w = 0.5 * (weights[hi] + weights[lo]);
    nodes[lo] = -x;
    nodes[hi] = x;
    weights[lo] = weights[hi] = w;
  }
  if (order % 2 == 1) nodes[static_cast<size_t>(order / 2)] = 0.0;
  return QuadratureRule(std::move(nodes), std::move(weights));
}

}  // namespace witness_forge
