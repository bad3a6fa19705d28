#pragma once

// Truncated Fock-space engine. Everything here works on dense matrices in
// the product basis |n_1 ... n_N>, mode 0 being the most significant digit.
// It is deliberately independent of the closed-form evaluators in
// states.hpp and serves as their oracle.

#include <span>
#include <vector>

#include "witness_forge/types.hpp"

namespace witness_forge {

class FockCutoff {
 public:
  explicit FockCutoff(int n_max);

  int n_max() const noexcept { return n_max_; }
  int dim() const noexcept { return n_max_ + 1; }

  friend bool operator==(const FockCutoff&, const FockCutoff&) = default;

 private:
  int n_max_;
};

/// Total Hilbert-space dimension (n_max+1)^n_modes.
long fock_dimension(int n_modes, FockCutoff cutoff);

struct ModeOperator {
  FockCutoff cutoff;
  CMatrix data;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-10) and renormalizes the trace. The PSD check
  /// needs a full eigendecomposition, so it is opt-in for large matrices.
  DensityMatrix(int n_modes, FockCutoff cutoff, CMatrix data, bool check_psd = true);

  static DensityMatrix from_pure(int n_modes, FockCutoff cutoff, const CVector& psi);

  int n_modes() const noexcept { return n_modes_; }
  FockCutoff cutoff() const noexcept { return cutoff_; }
  const CMatrix& data() const noexcept { return data_; }
  long dim() const noexcept { return static_cast<long>(data_.rows()); }

 private:
  struct Trusted {};
  DensityMatrix(Trusted, int n_modes, FockCutoff cutoff, CMatrix data);

  int n_modes_;
  FockCutoff cutoff_;
  CMatrix data_;
};

ModeOperator identity_matrix(FockCutoff cutoff);
ModeOperator annihilation_matrix(FockCutoff cutoff);

/// (a - alpha)^dagger (a - alpha), assembled from the ladder matrices. Every
/// entry equals the corresponding entry of the untruncated operator.
ModeOperator displaced_number_matrix(Complex alpha, FockCutoff cutoff);

/// <m|D(alpha)|n> from the associated-Laguerre closed form, exact entrywise.
CMatrix displacement_matrix(Complex alpha, FockCutoff cutoff);

/// Tr[rho (op_1 x ... x op_N)]; throws ImaginaryResidual if |Im| > 1e-8.
double tensor_expectation(const DensityMatrix& rho, std::span<const ModeOperator> ops);

/// Same contraction without the reality check.
Complex tensor_expectation_complex(const DensityMatrix& rho, std::span<const ModeOperator> ops);

/// Quadrature covariance in the ordering (x_1, p_1, ..., x_N, p_N) with
/// x = (a + a^dagger)/sqrt2, so the vacuum has variance 1/2. Built from
/// normal-ordered moments, which are exact in the truncated basis.
RMatrix covariance_matrix(const DensityMatrix& rho);

struct JointDistribution {
  int n_modes;
  FockCutoff cutoff;
  std::vector<double> probabilities;  // row-major over (n_1, ..., n_N)
  double mass_deficit;                // 1 - retained mass before renormalization
};

/// Photon-number statistics of the state displaced by -alpha per mode, i.e.
/// the outcome distribution of the operators n(alpha_j). Negative entries down
/// to -1e-10 are clipped; throws CutoffTooSmall if the deficit exceeds 1e-4.
JointDistribution joint_displaced_number_distribution(const DensityMatrix& rho,
                                                      std::span<const Complex> displacements);

/// Constant-efficiency loss (pure-loss beam splitter) applied mode by mode.
DensityMatrix attenuate(const DensityMatrix& rho, std::span<const double> etas);

/// Left-multiplies the row index of `m` by `op` acting on one mode.
void apply_on_mode(CMatrix& m, const CMatrix& op, int mode, int n_modes, int mode_dim);

}  // namespace witness_forge
