#pragma once

#include <vector>

namespace witness_forge {

/// Gauss-Hermite rule for the weight exp(-x^2) on the real line; the 2D rule
/// used for complex-plane Gaussians is the tensor product of two copies.
class QuadratureRule {
 public:
  static QuadratureRule gauss_hermite(int order);

  int order() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights);

  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace witness_forge
