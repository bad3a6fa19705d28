// Acceptance driver: one PASS/FAIL line per criterion, with the measured
// values and wall time on the lines beneath it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "property_checks.hpp"
#include "witness_forge/measurement.hpp"
#include "witness_forge/presets.hpp"
#include "witness_forge/reproduce.hpp"

using namespace witness_forge;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;
};

void absorb(Outcome& o, const ReproduceReport& rep) {
  for (const auto& r : rep.rows) {
    char buf[256];
    if (r.graded && std::isnan(r.target)) {
      std::snprintf(buf, sizeof buf, "  %-44s %12.6g  (check)                        %s", r.quantity.c_str(),
                    r.computed, r.pass ? "ok" : "MISS");
    } else if (r.graded) {
      std::snprintf(buf, sizeof buf, "  %-44s %12.6g  target %-10.6g tol %-8.2g %s", r.quantity.c_str(), r.computed,
                    r.target, r.tolerance, r.pass ? "ok" : "MISS");
    } else {
      std::snprintf(buf, sizeof buf, "  %-44s %12.6g  (info)", r.quantity.c_str(), r.computed);
    }
    o.lines.emplace_back(buf);
  }
  o.pass = o.pass && rep.passed();
}

Outcome from_cases(std::initializer_list<ReproduceCase> cases) {
  Outcome o;
  for (ReproduceCase c : cases) absorb(o, reproduce(c));
  return o;
}

Outcome properties() {
  Outcome o;
  for (const auto& r : testing::acceptance_properties(20240601)) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "  %-48s worst %-10.3g tol %-8.2g n=%-4d %s", r.name.c_str(), r.worst, r.tolerance,
                  r.instances, r.pass() ? "ok" : "MISS");
    o.lines.emplace_back(buf);
    if (!r.pass()) o.lines.push_back("    " + r.detail);
    o.pass = o.pass && r.pass();
  }
  return o;
}

Outcome simulator() {
  Outcome o;
  constexpr long kShots = 1'000'000;
  struct Case {
    const char* name;
    WitnessSpec witness;
    StateModel state;
  };
  const std::vector<Case> cases = {
      {"Bell-like", presets::bell_witness(), presets::bell_state()},
      {"TMSV, r = 1.15", presets::tmsv_circle_witness(1.15), Tmsv{0.5}},
      {"TMSV, r = r_max", presets::tmsv_circle_witness(presets::tmsv_r_max(0.5)), Tmsv{0.5}},
  };
  for (const auto& c : cases) {
    const double exact = expectation_L(c.state, c.witness);
    const MeasurementEstimate a = simulate(c.witness, c.state, kShots, 17);
    const MeasurementEstimate b = simulate(c.witness, c.state, kShots, 17);
    const double z = std::abs(a.mean - exact) / a.std_error;
    const bool same = a.mean == b.mean && a.std_error == b.std_error && a.per_k_counts == b.per_k_counts;
    char buf[256];
    std::snprintf(buf, sizeof buf, "  %-16s mean %.6f +- %.6f  exact %.6f  |z| %.2f  repeat %s", c.name, a.mean,
                  a.std_error, exact, z, same ? "identical" : "DIFFERS");
    o.lines.emplace_back(buf);
    o.pass = o.pass && z <= 5.0 && same;
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, 1.0, [] { return from_cases({ReproduceCase::Bell}); }},
      {2, 5.0, [] { return from_cases({ReproduceCase::Fig2Point}); }},
      {3, 30.0, [] { return from_cases({ReproduceCase::Tmsv, ReproduceCase::TmsvRadius}); }},
      {4, 60.0, [] { return from_cases({ReproduceCase::SubtractedGlobal, ReproduceCase::SubtractedLocal}); }},
      {5, 60.0, [] { return from_cases({ReproduceCase::FourmodeAppc}); }},
      {6, 180.0, [] { return from_cases({ReproduceCase::Table1}); }},
      {7, 60.0, [] { return from_cases({ReproduceCase::LossInvariance}); }},
      {8, 600.0, properties},
      {9, 120.0, simulator},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.lines.push_back(std::string("  error: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %d: %s\n", c.id, pass ? "PASS" : "FAIL");
    for (const auto& l : o.lines) std::printf("%s\n", l.c_str());
    std::printf("  time %.2f s (budget %.0f s)%s\n", seconds, c.budget_seconds, in_time ? "" : " EXCEEDED");
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
