#include <cmath>
#include <numeric>

#include "doctest.h"
#include "witness_forge/error.hpp"
#include "witness_forge/measurement.hpp"
#include "witness_forge/presets.hpp"
#include "witness_forge/witness.hpp"

using namespace witness_forge;

TEST_CASE("matching coherent product gives a deterministic zero") {
  CMatrix row(1, 2);
  row << Complex{0.4, -0.2}, Complex{-0.7, 0.5};
  const WitnessSpec w = WitnessSpec::uniform(PartitionSpec::bipartite(), row);
  const CoherentSuperposition psi{2, {{1.0, {row(0, 0), row(0, 1)}}}};
  const MeasurementEstimate e = simulate(w, psi, 5000, 11);
  CHECK(e.mean == 0.0);
  CHECK(e.std_error == 0.0);
  CHECK(e.shots == 5000);
  CHECK(e.per_k_counts == std::vector<long>{5000});
}

TEST_CASE("Bell-like estimate agrees with the closed form") {
  const WitnessSpec w = presets::bell_witness();
  const auto state = presets::bell_state();
  const MeasurementEstimate e = simulate(w, state, 200000, 5);
  const double exact = expectation_L(state, w);
  CHECK(std::abs(e.mean - exact) < 5.0 * e.std_error);
  CHECK(e.std_error > 0.0);
  CHECK(std::accumulate(e.per_k_counts.begin(), e.per_k_counts.end(), 0L) == e.shots);
  CHECK(e.mass_deficit < 1e-4);
}

TEST_CASE("determinism and worker independence") {
  const WitnessSpec w = presets::tmsv_circle_witness(1.15);
  SimulationOptions one;
  one.workers = 1;
  SimulationOptions three;
  three.workers = 3;
  const MeasurementEstimate a = simulate(w, Tmsv{0.5}, 60000, 42, one);
  const MeasurementEstimate b = simulate(w, Tmsv{0.5}, 60000, 42, one);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.per_k_counts == b.per_k_counts);
  const MeasurementEstimate c = simulate(w, Tmsv{0.5}, 60000, 42, three);
  const MeasurementEstimate d = simulate(w, Tmsv{0.5}, 60000, 42, three);
  CHECK(c.mean == d.mean);
  CHECK(c.mean == a.mean);
  CHECK(c.per_k_counts == a.per_k_counts);
  CHECK(simulate(w, Tmsv{0.5}, 60000, 43, one).mean != a.mean);
}

TEST_CASE("lossy detection with compensated displacements") {
  const WitnessSpec w = presets::tmsv_circle_witness(1.15);
  const std::vector<double> eta = {0.8, 0.6};
  SimulationOptions opt;
  opt.etas = eta;
  const WitnessSpec measured = compensate_for_loss(w, eta);
  const MeasurementEstimate e = simulate(measured, Tmsv{0.5}, 200000, 9, opt);
  const double expected = 0.48 * expectation_L(Tmsv{0.5}, w);
  CHECK(std::abs(e.mean - expected) < 5.0 * e.std_error);
}

TEST_CASE("simulation errors") {
  const WitnessSpec w = presets::bell_witness();
  CHECK_THROWS_AS(simulate(w, presets::bell_state(), 0, 1), Error);
  try {
    simulate(w, Tmsv{0.5}, 10, 1);
    simulate(presets::cat_witnesses()[0].witness, Tmsv{0.5}, 10, 1);
    FAIL("expected ModelMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModelMismatch);
  }
}
