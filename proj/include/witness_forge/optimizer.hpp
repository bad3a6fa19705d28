#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "witness_forge/states.hpp"
#include "witness_forge/witness.hpp"
#include "witness_forge/witness_spec.hpp"

namespace witness_forge {

struct GeneBounds {
  double lo = -5.0;
  double hi = 5.0;
};

struct GaConfig {
  int population = 64;
  int generations = 200;
  double mutation_sigma = 0.1;
  double mutation_decay = 0.99;  // per generation
  double crossover_rate = 0.7;
  int elite_count = 2;
  int tournament_size = 3;
  std::uint64_t seed = 0;
  /// One interval per gene, or a single interval applied to every gene.
  std::vector<GeneBounds> bounds = {GeneBounds{}};
  bool optimize_lambdas = false;
  /// Per-mode phases; when set every displacement is a real multiple of the
  /// mode's phase factor and gets a single gene.
  std::optional<std::vector<double>> collinear_phases;
  int fitness_starts = 16;
  int report_starts = 64;
  /// Budget of a bounded Nelder-Mead refinement of the final best genome;
  /// 0 leaves the GA result as is.
  int polish_evaluations = 1000;
  int threads = 0;  // 0: thread_count()

  void validate() const;
};

/// Maps a gene vector to a witness. The default ansatz encodes displacement
/// rows (and optionally lambdas); custom ones can pin any structure.
struct WitnessAnsatz {
  int n_genes = 0;
  std::function<WitnessSpec(std::span<const double>)> decode;
};

struct GaResult {
  WitnessSpec witness;
  EvaluationReport report;           // with config.report_starts
  std::vector<double> genes;
  double best_fitness = 0.0;         // with config.fitness_starts
  std::vector<double> best_history;  // best fitness after each generation
  std::vector<double> initial_fitness;
};

/// Default encoding: (Re, Im) per displacement, one real per displacement
/// under collinear_phases, plus softmax lambda genes when optimize_lambdas.
WitnessAnsatz displacement_ansatz(const PartitionSpec& partition, int m, const GaConfig& config);

/// Moves rows closer than 1e-6 apart so the witness invariants hold.
CMatrix separate_rows(CMatrix displacements);

/// Minimizes <L> - g_min over the ansatz. Deterministic for a fixed config.
GaResult ga_optimize(const StateModel& state, const WitnessAnsatz& ansatz, const GaConfig& config);
GaResult ga_optimize(const StateModel& state, const PartitionSpec& partition, int m, const GaConfig& config);

using StateFamily = std::function<StateModel(double)>;
using WitnessFamily = std::function<WitnessSpec(double)>;

struct SweepRow {
  double param;
  double expectation;
  double g_min;
  double witness_value;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

SweepResult sweep(const StateFamily& states, const WitnessSpec& witness, std::span<const double> grid,
                  const SevOptions& options = {}, int threads = 0);
SweepResult sweep(const StateFamily& states, const WitnessFamily& witnesses, std::span<const double> grid,
                  const SevOptions& options = {}, int threads = 0);

/// Parameter in [lo, hi] where <L> - g_min changes sign, to within tol.
/// Throws NoSignChange if the end points do not bracket a sign change.
double bisect_critical(const StateFamily& states, const WitnessSpec& witness, double lo, double hi, double tol,
                       const SevOptions& options = {});
double bisect_critical(const StateFamily& states, const WitnessFamily& witnesses, double lo, double hi,
                       double tol, const SevOptions& options = {});

struct RadiusAnalysis {
  double r_crit;         // closed form
  double r_max;          // closed form, sqrt2 r_crit
  double r_best;         // grid maximizer of R
  double R_best;         // R at r_best
  double R_at_r_max;     // R evaluated at the closed-form r_max
  double grid_step;      // largest spacing of the grid around r_best
};

/// R(r) = g_min/<L> - 1 for the circle witness on the TMSV, over the grid.
RadiusAnalysis radius_analysis(Complex xi, std::span<const double> r_grid, const SevOptions& options = {});

}  // namespace witness_forge
