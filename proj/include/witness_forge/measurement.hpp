#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "witness_forge/fock.hpp"
#include "witness_forge/states.hpp"
#include "witness_forge/witness_spec.hpp"

namespace witness_forge {

struct MeasurementEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(shots)
  long shots = 0;
  std::uint64_t seed = 0;
  std::vector<long> per_k_counts;
  int workers = 1;
  int n_max = 0;             // cutoff used for the state
  double mass_deficit = 0.0; // largest truncation deficit over displacement rows
};

struct SimulationOptions {
  std::optional<FockCutoff> cutoff;         // default: auto_cutoff
  std::optional<std::vector<double>> etas;  // detection efficiencies
  int workers = 0;                          // 0: thread_count()
};

/// Shot-by-shot emulation of the randomized-displacement measurement: row k
/// is drawn with probability lambda_k, the photon numbers of all modes are
/// drawn from the joint displaced distribution of the (attenuated) state, and
/// the shot contributes scale * prod_l sum_{j in l} q_j n_j.
MeasurementEstimate simulate(const WitnessSpec& witness, const StateModel& state, long shots, std::uint64_t seed,
                             const SimulationOptions& options = {});

}  // namespace witness_forge
