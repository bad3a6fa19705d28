#pragma once

#include <optional>
#include <vector>

#include "witness_forge/types.hpp"

namespace witness_forge {

/// Decomposition of modes {0..n_modes-1} into K disjoint, non-empty blocks.
class PartitionSpec {
 public:
  PartitionSpec(int n_modes, std::vector<std::vector<int>> blocks);

  /// {0}:{1}
  static PartitionSpec bipartite();
  /// {0}:{1}:...:{n-1}
  static PartitionSpec full(int n_modes);

  int n_modes() const noexcept { return n_modes_; }
  int block_count() const noexcept { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const noexcept { return blocks_; }
  const std::vector<int>& block(int l) const { return blocks_.at(static_cast<size_t>(l)); }
  int block_of(int mode) const { return block_of_.at(static_cast<size_t>(mode)); }

  friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;

 private:
  int n_modes_;
  std::vector<std::vector<int>> blocks_;
  std::vector<int> block_of_;
};

/// Parameters of the test operator
///   L = scale * sum_k lambda_k  prod_l  sum_{j in block l} q_j n_j(alpha_kj).
class WitnessSpec {
 public:
  /// Rejects lambdas that are non-positive or do not sum to 1 within 1e-12,
  /// displacement rows closer than 1e-12, negative q, and non-positive scale.
  /// Missing q_weights default to 1/|block| for every mode of a block.
  WitnessSpec(PartitionSpec partition, std::vector<double> lambdas, CMatrix displacements,
              std::optional<std::vector<double>> q_weights = std::nullopt, double scale = 1.0);

  /// Convenience: lambda_k = 1/m.
  static WitnessSpec uniform(PartitionSpec partition, CMatrix displacements,
                             std::optional<std::vector<double>> q_weights = std::nullopt);

  const PartitionSpec& partition() const noexcept { return partition_; }
  int n_modes() const noexcept { return partition_.n_modes(); }
  int m() const noexcept { return static_cast<int>(lambdas_.size()); }
  const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  const CMatrix& displacements() const noexcept { return displacements_; }
  Complex displacement(int k, int mode) const { return displacements_(k, mode); }
  const std::vector<double>& q_weights() const noexcept { return q_weights_; }
  double scale() const noexcept { return scale_; }

  WitnessSpec with_displacements(CMatrix displacements) const;
  WitnessSpec with_scale(double scale) const;

 private:
  PartitionSpec partition_;
  std::vector<double> lambdas_;
  CMatrix displacements_;
  std::vector<double> q_weights_;
  double scale_;
};

std::vector<double> default_q_weights(const PartitionSpec& partition);

}  // namespace witness_forge
