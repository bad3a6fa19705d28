#pragma once

// Named witness and state configurations used by the reproduction suite,
// the CLI and the tests.

#include <string>
#include <vector>

#include "witness_forge/states.hpp"
#include "witness_forge/witness_spec.hpp"

namespace witness_forge::presets {

inline constexpr double kBellGamma = 0.6;
inline const Complex kBellEpsilon = std::polar(1.0, 3.0 * kPi / 4.0);

/// Q_1 = -sqrt2 g, Q_2 = Q_3^* = [(D + 1/D) + i sqrt(D^2 + 1/D^2)] g/2 with
/// D = (sqrt2 - 1)^(1/3): the three points whose equal-weight witness has
/// |g,-g> and |-g,g> as degenerate separability eigenstates.
std::vector<Complex> bell_q_points(double gamma = kBellGamma);

/// alpha = (Q1, 1.2 Q2, 0.8 Q3), beta = (Q1, 0.8 Q2, 1.2 Q3), lambda = 1/3.
WitnessSpec bell_witness(double gamma = kBellGamma);

/// alpha_k = beta_k = Q_k.
WitnessSpec bell_symmetric_witness(double gamma = kBellGamma);

CoherentSuperposition bell_state(Complex epsilon = kBellEpsilon, double gamma = kBellGamma);

/// alpha_k = r exp(i[1/2 - 2(k-1)] pi/3), beta_k = alpha_k^*, both rotated by
/// exp(i arg(xi)/2) so the witness follows the squeezing phase.
WitnessSpec tmsv_circle_witness(double r, Complex xi = {0.5, 0.0});

/// r_crit = (1/2) sqrt(cosh(2|xi|)(exp(2|xi|) - 1)) and r_max = sqrt2 r_crit.
double tmsv_r_crit(Complex xi);
double tmsv_r_max(Complex xi);

/// alpha = (r e^{i pi/5}, -i r, -r e^{-i pi/5}), beta = alpha^*, r = 2.2.
WitnessSpec subtracted_global_witness();

/// alpha_1 = 1.6 e^{i pi/3}, alpha_2 = alpha_1^*, alpha_3 = -1.6,
/// beta_k = (2.2/1.6) alpha_k^*.
WitnessSpec subtracted_local_witness();

/// Same witness with the roles of the two modes exchanged.
WitnessSpec swap_modes(const WitnessSpec& witness);

inline constexpr double kCatGamma = 0.4;

struct NamedWitness {
  std::string name;
  WitnessSpec witness;
};

/// The four real-displacement witnesses for the noisy four-mode cat:
/// {0}:{1}:{2}:{3}, {0}:{1,2}:{3}, {0,1}:{2,3}, {0}:{1,2,3}.
std::vector<NamedWitness> cat_witnesses();

}  // namespace witness_forge::presets
