#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "witness_forge/error.hpp"
#include "witness_forge/optimizer.hpp"
#include "witness_forge/presets.hpp"

using namespace witness_forge;

namespace {

// Three points on a circle of radius r at free angles, beta = alpha^*:
// genes (r, theta_1, theta_2, theta_3).
WitnessAnsatz circle_ansatz() {
  return {4, [](std::span<const double> g) {
            CMatrix d(3, 2);
            for (int k = 0; k < 3; ++k) {
              d(k, 0) = std::polar(g[0], g[static_cast<size_t>(k) + 1]);
              d(k, 1) = std::conj(d(k, 0));
            }
            return WitnessSpec::uniform(PartitionSpec::bipartite(), separate_rows(d));
          }};
}

bool code_of_nosign(const StateFamily& states, const WitnessSpec& w) {
  try {
    bisect_critical(states, w, 0.0, 0.05, 1e-4);
  } catch (const Error& e) {
    return e.code() == ErrorCode::NoSignChange;
  }
  return false;
}

}  // namespace

TEST_CASE("GA configuration validation") {
  GaConfig c;
  CHECK_NOTHROW(c.validate());
  c.population = 3;
  CHECK_THROWS_AS(c.validate(), Error);
  c = GaConfig{};
  c.elite_count = c.population;
  CHECK_THROWS_AS(c.validate(), Error);
  c = GaConfig{};
  c.bounds = {GeneBounds{1.0, -1.0}};
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("displacement ansatz encoding") {
  GaConfig c;
  const WitnessAnsatz plain = displacement_ansatz(PartitionSpec::bipartite(), 3, c);
  CHECK(plain.n_genes == 12);
  std::vector<double> genes(12);
  for (size_t i = 0; i < genes.size(); ++i) genes[i] = 0.1 * static_cast<double>(i);
  const WitnessSpec w = plain.decode(genes);
  CHECK(w.displacement(0, 0) == Complex{0.0, 0.1});
  CHECK(w.lambdas()[0] == doctest::Approx(1.0 / 3.0));

  c.optimize_lambdas = true;
  const WitnessAnsatz lam = displacement_ansatz(PartitionSpec::bipartite(), 3, c);
  CHECK(lam.n_genes == 15);
  std::vector<double> lg(15, 0.3);
  for (size_t i = 0; i < 12; ++i) lg[i] = 0.2 * static_cast<double>(i);
  lg[14] = 2.0;
  const WitnessSpec wl = lam.decode(lg);
  double total = 0.0;
  for (double x : wl.lambdas()) total += x;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(wl.lambdas()[2] > wl.lambdas()[0]);

  c.optimize_lambdas = false;
  c.collinear_phases = std::vector<double>{0.0, kPi / 2};
  const WitnessAnsatz col = displacement_ansatz(PartitionSpec::bipartite(), 3, c);
  CHECK(col.n_genes == 6);
  const WitnessSpec wc = col.decode(std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(std::abs(wc.displacement(0, 1) - Complex{0.0, 2.0}) < 1e-15);
  CHECK(is_collinear_m3(wc));
}

TEST_CASE("rows closer than the threshold are separated") {
  CMatrix d(3, 2);
  d << 0.5, 0.5, 0.5, 0.5, 1.0, -1.0;
  const CMatrix s = separate_rows(d);
  CHECK((s.row(0) - s.row(1)).norm() >= 1e-6);
  CHECK((s.row(2) - d.row(2)).norm() == 0.0);
  CHECK_NOTHROW(WitnessSpec::uniform(PartitionSpec::bipartite(), s));
}

TEST_CASE("GA on the Bell-like state") {
  GaConfig c;
  c.seed = 7;
  const GaResult r = ga_optimize(presets::bell_state(), PartitionSpec::bipartite(), 3, c);
  CHECK(r.report.witness_value <= -0.015);
  CHECK(r.witness.lambdas() == std::vector<double>(3, 1.0 / 3.0));
  for (size_t i = 1; i < r.best_history.size(); ++i) CHECK(r.best_history[i] <= r.best_history[i - 1]);
  REQUIRE(r.best_history.size() == static_cast<size_t>(c.generations) + 1);

  // same config, same answer
  c.generations = 5;
  const GaResult a = ga_optimize(presets::bell_state(), PartitionSpec::bipartite(), 3, c);
  c.threads = 1;
  const GaResult b = ga_optimize(presets::bell_state(), PartitionSpec::bipartite(), 3, c);
  CHECK(a.genes == b.genes);
  CHECK(a.best_fitness == b.best_fitness);
}

TEST_CASE("GA on the TMSV with a circle ansatz") {
  GaConfig c;
  c.seed = 3;
  c.bounds = {GeneBounds{0.2, 1.6}, GeneBounds{-kPi, kPi}, GeneBounds{-kPi, kPi}, GeneBounds{-kPi, kPi}};
  const GaResult r = ga_optimize(Tmsv{0.5}, circle_ansatz(), c);
  CHECK(r.report.witness_value <= -0.42 + 0.02);
  CHECK(r.best_fitness <= *std::min_element(r.initial_fitness.begin(), r.initial_fitness.end()));
}

TEST_CASE("sweep and bisection") {
  const auto cat = presets::cat_witnesses();
  const StateFamily noisy = [](double s) -> StateModel { return NoisyFourModeCat{presets::kCatGamma, s}; };
  const std::vector<double> grid = {0.0, 0.05, 0.1, 0.15};
  const SweepResult sw = sweep(noisy, cat[0].witness, grid);
  REQUIRE(sw.rows.size() == 4);
  CHECK(std::abs(sw.rows[0].expectation - 1.03) < 0.01);
  CHECK(std::abs(sw.rows[0].g_min - 1.22) < 0.01);
  for (const auto& row : sw.rows) {
    CHECK(row.g_min == sw.rows[0].g_min);
    CHECK(row.witness_value == doctest::Approx(row.expectation - row.g_min));
  }
  CHECK(sw.rows[1].witness_value < 0.0);
  CHECK(sw.rows[3].witness_value > 0.0);

  const double coarse = bisect_critical(noisy, cat[0].witness, 0.05, 0.15, 1e-5);
  const double fine = bisect_critical(noisy, cat[0].witness, 0.09, 0.10, 1e-5);
  CHECK(std::abs(coarse - 0.097) < 0.005);
  CHECK(std::abs(coarse - fine) <= 2e-5);

  CHECK(code_of_nosign(noisy, cat[0].witness));
  const std::vector<double> unsorted = {0.1, 0.0};
  CHECK_THROWS_AS(sweep(noisy, cat[0].witness, unsorted), Error);
  CHECK_THROWS_AS(sweep(noisy, cat[0].witness, std::span<const double>{}), Error);
}

TEST_CASE("TMSV radius analysis") {
  CHECK(presets::tmsv_r_crit(0.5) == doctest::Approx(0.5 * std::sqrt(std::cosh(1.0) * (std::exp(1.0) - 1.0))));
  CHECK(presets::tmsv_r_max(0.5) == doctest::Approx(std::sqrt(2.0) * presets::tmsv_r_crit(0.5)));
  CHECK(std::abs(presets::tmsv_r_max(0.5) - 1.1514) < 1e-3);
  CHECK(presets::tmsv_r_crit(1e-8) < 1e-3);

  const StateFamily fixed = [](double) -> StateModel { return Tmsv{0.5}; };
  const WitnessFamily circle = [](double r) { return presets::tmsv_circle_witness(r, 0.5); };
  const double r_crit = bisect_critical(fixed, circle, 0.5, 1.0, 1e-5);
  CHECK(std::abs(r_crit - 0.8142) < 0.005);

  std::vector<double> grid;
  for (int i = 0; i <= 14; ++i) grid.push_back(0.85 + 0.05 * i);
  const RadiusAnalysis ra = radius_analysis(0.5, grid);
  CHECK(std::abs(ra.r_best - ra.r_max) <= ra.grid_step + 1e-12);
  CHECK(std::abs(ra.R_at_r_max - 0.313) < 0.005);
}
