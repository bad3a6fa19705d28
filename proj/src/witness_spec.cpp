#include "witness_forge/witness_spec.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "witness_forge/error.hpp"

namespace witness_forge {

namespace {
constexpr double kLambdaSumTol = 1e-12;
constexpr double kDistinctRowTol = 1e-12;
}  // namespace

PartitionSpec::PartitionSpec(int n_modes, std::vector<std::vector<int>> blocks)
    : n_modes_(n_modes), blocks_(std::move(blocks)), block_of_(static_cast<size_t>(std::max(n_modes, 0)), -1) {
  if (n_modes < 1) fail(ErrorCode::InvalidArgument, "partition needs at least one mode");
  if (blocks_.empty()) fail(ErrorCode::InvalidArgument, "partition needs at least one block");
  for (size_t l = 0; l < blocks_.size(); ++l) {
    if (blocks_[l].empty()) fail(ErrorCode::InvalidArgument, "partition block " + std::to_string(l) + " is empty");
    for (int j : blocks_[l]) {
      if (j < 0 || j >= n_modes) {
        fail(ErrorCode::InvalidArgument, "mode index " + std::to_string(j) + " outside 0.." +
                                             std::to_string(n_modes - 1));
      }
      if (block_of_[static_cast<size_t>(j)] != -1) {
        fail(ErrorCode::InvalidArgument, "mode " + std::to_string(j) + " appears in more than one block");
      }
      block_of_[static_cast<size_t>(j)] = static_cast<int>(l);
    }
  }
  for (int j = 0; j < n_modes; ++j) {
    if (block_of_[static_cast<size_t>(j)] == -1) {
      fail(ErrorCode::InvalidArgument, "mode " + std::to_string(j) + " is not covered by the partition");
    }
  }
}

PartitionSpec PartitionSpec::bipartite() { return PartitionSpec(2, {{0}, {1}}); }

PartitionSpec PartitionSpec::full(int n_modes) {
  std::vector<std::vector<int>> blocks;
  for (int j = 0; j < n_modes; ++j) blocks.push_back({j});
  return PartitionSpec(n_modes, std::move(blocks));
}

std::vector<double> default_q_weights(const PartitionSpec& partition) {
  std::vector<double> q(static_cast<size_t>(partition.n_modes()));
  for (const auto& block : partition.blocks()) {
    for (int j : block) q[static_cast<size_t>(j)] = 1.0 / static_cast<double>(block.size());
  }
  return q;
}

WitnessSpec::WitnessSpec(PartitionSpec partition, std::vector<double> lambdas, CMatrix displacements,
                         std::optional<std::vector<double>> q_weights, double scale)
    : partition_(std::move(partition)),
      lambdas_(std::move(lambdas)),
      displacements_(std::move(displacements)),
      q_weights_(q_weights ? std::move(*q_weights) : default_q_weights(partition_)),
      scale_(scale) {
  const int m = static_cast<int>(lambdas_.size());
  if (m < 1) fail(ErrorCode::InvalidArgument, "witness needs m >= 1 displacement rows");
  if (displacements_.rows() != m) {
    fail(ErrorCode::InvalidArgument, "displacements have " + std::to_string(displacements_.rows()) +
                                         " rows but there are " + std::to_string(m) + " weights");
  }
  if (displacements_.cols() != partition_.n_modes()) {
    fail(ErrorCode::ModelMismatch, "displacements have " + std::to_string(displacements_.cols()) +
                                       " columns but the partition has " +
                                       std::to_string(partition_.n_modes()) + " modes");
  }
  if (static_cast<int>(q_weights_.size()) != partition_.n_modes()) {
    fail(ErrorCode::ModelMismatch, "q_weights must have one entry per mode");
  }
  for (double q : q_weights_) {
    if (!(q >= 0.0) || !std::isfinite(q)) fail(ErrorCode::InvalidArgument, "q_weights must be finite and >= 0");
  }
  double sum = 0.0;
  for (double l : lambdas_) {
    if (!(l > 0.0) || !std::isfinite(l)) fail(ErrorCode::InvalidArgument, "lambdas must be positive");
    sum += l;
  }
  if (std::abs(sum - 1.0) > kLambdaSumTol) {
    fail(ErrorCode::InvalidArgument, "lambdas sum to " + std::to_string(sum) + ", expected 1");
  }
  if (!displacements_.allFinite()) fail(ErrorCode::InvalidArgument, "displacements must be finite");
  for (int k = 0; k < m; ++k) {
    for (int k2 = k + 1; k2 < m; ++k2) {
      if ((displacements_.row(k) - displacements_.row(k2)).cwiseAbs().maxCoeff() <= kDistinctRowTol) {
        fail(ErrorCode::InvalidArgument, "displacement rows " + std::to_string(k) + " and " +
                                             std::to_string(k2) + " coincide");
      }
    }
  }
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) fail(ErrorCode::NonpositiveScale, "witness scale must be positive");
}

WitnessSpec WitnessSpec::uniform(PartitionSpec partition, CMatrix displacements,
                                 std::optional<std::vector<double>> q_weights) {
  const auto m = static_cast<size_t>(displacements.rows());
  std::vector<double> lambdas(m, m == 0 ? 0.0 : 1.0 / static_cast<double>(m));
  return WitnessSpec(std::move(partition), std::move(lambdas), std::move(displacements), std::move(q_weights));
}

WitnessSpec WitnessSpec::with_displacements(CMatrix displacements) const {
  return WitnessSpec(partition_, lambdas_, std::move(displacements), q_weights_, scale_);
}

WitnessSpec WitnessSpec::with_scale(double scale) const {
  return WitnessSpec(partition_, lambdas_, displacements_, q_weights_, scale);
}

}  // namespace witness_forge
