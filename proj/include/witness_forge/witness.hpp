#pragma once

// Separability bound of displaced photon-number witnesses.
//
// For every operator of the family the minimal separability eigenvalue is
// attained on a product of coherent states, so g_min is the global minimum of
//   f(b) = scale * sum_k lambda_k prod_l sum_{j in l} q_j |b_j - alpha_kj|^2
// over b in C^N. The multistart solver minimizes f by exact block updates
// (each block subproblem is a convex quadratic) followed by a Newton polish;
// the collinear m = 3 bipartite case also has an exact quintic route.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "witness_forge/states.hpp"
#include "witness_forge/types.hpp"
#include "witness_forge/witness_spec.hpp"

namespace witness_forge {

enum class SevMethod { MultistartAlternating, CollinearQuintic };

std::string_view to_string(SevMethod method);

struct StationaryPoint {
  CVector amplitudes;
  double value;
};

struct SevSolution {
  double g_min = 0.0;
  CVector argmin;
  std::vector<StationaryPoint> stationary_points;  // distinct local minima, ascending
  double residual = 0.0;
  int starts_used = 0;
  SevMethod method = SevMethod::MultistartAlternating;
};

struct EvaluationReport {
  double expectation = 0.0;
  double g_min = 0.0;
  double witness_value = 0.0;
  bool entangled = false;
  std::optional<double> margin_relative;  // g_min/expectation - 1, if expectation > 0
};

struct SingleModeCollapse {
  Complex mean_amplitude;
  double offset;
};

/// sum_k lambda_k n(alpha_k) = n(mean) + offset * 1
SingleModeCollapse collapse_single_mode(std::span<const double> lambdas,
                                        std::span<const Complex> alphas);

double sev_objective(const WitnessSpec& witness, const CVector& amplitudes);

/// Exact minimization of the objective over the amplitudes of one block with
/// the other blocks held fixed. Throws DegenerateWeights if every block weight
/// vanishes (then the objective is already zero).
CVector alternating_update(const WitnessSpec& witness, const CVector& amplitudes, int block);

/// max_j |dF/d conj(b_j)|, the stationarity defect of the coupled amplitude
/// equations at the given point.
double stationarity_residual(const WitnessSpec& witness, const CVector& amplitudes);

inline constexpr int kDefaultSevStarts = 64;
inline constexpr int kMaxSweeps = 10'000;

SevSolution solve_sev_multistart(const WitnessSpec& witness, int n_starts = kDefaultSevStarts,
                                 std::uint64_t seed = 0);

/// True for bipartite, single-mode-block witnesses with m = 3 whose alpha rows
/// lie on one line through the origin and whose beta rows lie on another.
bool is_collinear_m3(const WitnessSpec& witness, double tol = 1e-10);

/// Roots of the quintic stationarity polynomial (companion matrix), back
/// substitution into the fixed-point formula for alpha, minimum over the
/// resulting stationary pairs. Throws NotCollinear or NoRealRoot.
SevSolution solve_sev_collinear_m3(const WitnessSpec& witness);

struct SevOptions {
  int n_starts = kDefaultSevStarts;
  std::uint64_t seed = 0;
  bool use_quintic_when_collinear = true;
};

/// Multistart, additionally cross-checked by the quintic route where it
/// applies; the lower of the two bounds is reported.
SevSolution solve_sev(const WitnessSpec& witness, const SevOptions& options = {});

/// Witness for detection efficiency eta_j: displacements alpha/sqrt(eta) and
/// weights q*eta, the operator actually measured behind lossy detectors.
WitnessSpec apply_loss(const WitnessSpec& witness, std::span<const double> etas);

/// Displacements scaled by sqrt(eta_j): the choice that makes the lossy
/// witness a positive multiple of the lossless one.
WitnessSpec compensate_for_loss(const WitnessSpec& witness, std::span<const double> etas);

/// Bound of mu L + nu: mu g_min + nu with the same separable eigenstates.
SevSolution affine_rescale(const SevSolution& solution, double mu, double nu);
double affine_rescale(double g_min, double mu, double nu);

EvaluationReport make_report(double expectation, double g_min);

EvaluationReport evaluate(const WitnessSpec& witness, const StateModel& state,
                          const SevOptions& options = {});

}  // namespace witness_forge
