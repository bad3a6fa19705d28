#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "witness_forge/fock.hpp"
#include "witness_forge/quadrature.hpp"
#include "witness_forge/types.hpp"
#include "witness_forge/witness_spec.hpp"

namespace witness_forge {

struct CoherentTerm {
  Complex coeff;
  std::vector<Complex> amplitudes;  // one per mode
};

/// sum_t coeff_t |amp_t1> x ... x |amp_tN>, normalized from the overlaps.
struct CoherentSuperposition {
  int n_modes = 0;
  std::vector<CoherentTerm> terms;
};

/// exp[-xi a^dag b^dag + xi^* a b] |0,0>
struct Tmsv {
  Complex xi;
};

/// (sqrt(kappa) a + sqrt(1-kappa) b) |xi>, normalized.
struct PhotonSubtractedTmsv {
  Complex xi;
  double kappa = 0.5;
};

/// Gaussian mixture (std. deviation sigma per quadrature) over gamma' of the
/// four-mode cat (|g,g,g,g> + |-g,-g,-g,-g>)/norm.
struct NoisyFourModeCat {
  Complex gamma;
  double sigma = 0.0;
};

struct FockDensity {
  DensityMatrix matrix;
};

using StateModel =
    std::variant<CoherentSuperposition, Tmsv, PhotonSubtractedTmsv, NoisyFourModeCat, FockDensity>;

int mode_count(const StateModel& state);

/// Checks the per-family invariants (kappa in [0,1], sigma >= 0, shapes).
void validate_state(const StateModel& state);

/// N [ (1 - |eps|/2) |g>|-g> + (eps/2) |-g>|g> ]
CoherentSuperposition bell_like_state(Complex epsilon, Complex gamma);

/// (|g,g,g,g> + |-g,-g,-g,-g>) / sqrt(2(1 + exp(-8|g|^2)))
CoherentSuperposition four_mode_cat(Complex gamma);

/// <psi| n(d_1) x ... x n(d_N) |psi> for a normalized coherent superposition.
/// Throws DegenerateNorm if the squared norm from overlaps is below 1e-12.
double coherent_superposition_correlation(const CoherentSuperposition& state,
                                          std::span<const Complex> displacements);

double tmsv_correlation(Complex xi, Complex alpha, Complex beta);

/// Closed form for the photon-subtracted TMSV. The cross term is written as
/// -2 sinh|2xi| Re(exp(-i arg xi) alpha beta), which is real for every xi and
/// matches the commonly quoted real-xi expression.
double photon_subtracted_correlation(Complex xi, double kappa, Complex alpha, Complex beta);

inline constexpr int kDefaultQuadratureOrder = 20;
inline constexpr int kMaxQuadratureOrder = 160;

/// Integral of inner(g') against the isotropic complex Gaussian centred on
/// gamma. The order of `rule` is doubled until two successive results agree
/// to 1e-6 (QuadratureNotConverged past kMaxQuadratureOrder).
double mixture_expectation(Complex gamma, double sigma, const std::function<double(Complex)>& inner,
                           const QuadratureRule& rule);

/// <L> of the witness for the state, with the closed-form evaluator of the
/// family where one exists, and the Fock oracle for FockDensity.
double expectation_L(const StateModel& state, const WitnessSpec& witness);

/// Closed-form <L> for a coherent superposition and any partition.
double coherent_superposition_expectation_L(const CoherentSuperposition& state,
                                            const WitnessSpec& witness);

/// <L> evaluated on a density matrix by expanding every block sum into
/// per-mode tensor products.
double fock_expectation_L(const DensityMatrix& rho, const WitnessSpec& witness);

/// Fock-space image of any state model. Throws CutoffTooSmall when the
/// truncated norm deficit exceeds 1e-6 (before renormalization).
DensityMatrix state_to_fock(const StateModel& state, FockCutoff cutoff);

/// Truncated-norm deficit 1 - ||P psi||^2 of the state at the cutoff.
double truncation_deficit(const StateModel& state, FockCutoff cutoff);

/// Smallest cutoff with trace deficit < 1e-8; when a witness is supplied the
/// Fock value of <L> must also agree with the closed form to 1e-6.
FockCutoff auto_cutoff(const StateModel& state, const WitnessSpec* witness = nullptr,
                       int max_n_max = 60);

}  // namespace witness_forge
