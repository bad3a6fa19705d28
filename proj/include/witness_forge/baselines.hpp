#pragma once

#include <optional>
#include <string_view>

#include "witness_forge/fock.hpp"
#include "witness_forge/states.hpp"
#include "witness_forge/types.hpp"

namespace witness_forge {

enum class Criterion { Simon, Duan };

std::string_view to_string(Criterion criterion);

struct BaselineResult {
  Criterion criterion;
  double value;
  bool entangled;  // value < 0
};

/// Throws InvalidCovariance unless cov is a finite, symmetric 4x4 matrix
/// with V + (i/2) Omega >= -1e-6 (Heisenberg-Robertson).
void check_covariance(const RMatrix& cov);

/// Simon's PPT polynomial in the vacuum-variance-1/2 convention,
///   det A det B + (1/4 - |det C|)^2 - tr(A J C J B J C^T J) - (det A + det B)/4,
/// for cov = [[A, C], [C^T, B]]; negative iff the partial transpose is
/// unphysical. Values within 1e-10 of zero are reported as exactly zero,
/// since the polynomial cancels to rounding level on boundary states.
BaselineResult simon_criterion(const RMatrix& cov);

/// Duan et al.: Var(u) + Var(v) - (a^2 + 1/a^2) for u = a x1 + x2/a,
/// v = a p1 - p2/a, minimized over local quadrature rotations (in closed
/// form) and over a in [1e-3, 1e3] (log grid plus golden section).
BaselineResult duan_criterion(const RMatrix& cov);

/// Two-mode covariance of a state through the Fock oracle. Without an
/// explicit cutoff, n_max starts at auto_cutoff and grows in steps of two
/// until successive matrices agree to 1e-12: second moments converge more
/// slowly than the trace.
RMatrix state_covariance(const StateModel& state, std::optional<FockCutoff> cutoff = std::nullopt);

}  // namespace witness_forge
