#include "witness_forge/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "witness_forge/error.hpp"
#include "witness_forge/parallel.hpp"

namespace witness_forge {

namespace {

constexpr double kTargetDeficit = 1e-8;
constexpr long kMaxSimulationDim = 4096;

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) c[i] = acc += p[i];
  for (double& x : c) x /= acc;
  c.back() = 1.0;
  return c;
}

size_t draw(const std::vector<double>& cdf, double u) {
  return static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

struct Partial {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::vector<long> counts;
};

}  // namespace

MeasurementEstimate simulate(const WitnessSpec& witness, const StateModel& state, long shots, std::uint64_t seed,
                             const SimulationOptions& options) {
  if (shots < 1) fail(ErrorCode::InvalidArgument, "shots must be >= 1");
  if (mode_count(state) != witness.n_modes()) {
    fail(ErrorCode::ModelMismatch, "state has " + std::to_string(mode_count(state)) + " modes but the witness has " +
                                       std::to_string(witness.n_modes()));
  }
  const int n = witness.n_modes();
  const int m = witness.m();

  // Per-row photon-number distributions. Displacing the state moves weight to
  // higher photon numbers, so without an explicit cutoff n_max grows past the
  // state's own auto_cutoff until every row keeps its mass.
  auto distributions = [&](FockCutoff cut) {
    DensityMatrix rho = state_to_fock(state, cut);
    if (options.etas) rho = attenuate(rho, *options.etas);
    std::vector<JointDistribution> out;
    for (int k = 0; k < m; ++k) {
      std::vector<Complex> row(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j) row[static_cast<size_t>(j)] = witness.displacement(k, j);
      out.push_back(joint_displaced_number_distribution(rho, row));
    }
    return out;
  };
  auto worst_deficit = [](const std::vector<JointDistribution>& dists) {
    double worst = 0.0;
    for (const auto& d : dists) worst = std::max(worst, d.mass_deficit);
    return worst;
  };

  FockCutoff cutoff = options.cutoff ? *options.cutoff : auto_cutoff(state, &witness);
  std::optional<std::vector<JointDistribution>> dists;
  if (options.cutoff) {
    dists = distributions(cutoff);
  } else {
    for (FockCutoff trial = cutoff;; trial = FockCutoff(trial.n_max() + 2)) {
      if (fock_dimension(n, trial) > kMaxSimulationDim) break;
      try {
        dists = distributions(trial);
        cutoff = trial;
        if (worst_deficit(*dists) < kTargetDeficit) break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::CutoffTooSmall) throw;
      }
    }
    if (!dists) dists = distributions(cutoff);  // reports the failure
  }

  const int d = cutoff.dim();
  const long outcomes = fock_dimension(n, cutoff);

  // outcome value, independent of the row
  std::vector<double> value(static_cast<size_t>(outcomes));
  for (long idx = 0; idx < outcomes; ++idx) {
    std::vector<int> photons(static_cast<size_t>(n));
    long rem = idx;
    for (int j = n - 1; j >= 0; --j) {
      photons[static_cast<size_t>(j)] = static_cast<int>(rem % d);
      rem /= d;
    }
    double prod = witness.scale();
    for (const auto& block : witness.partition().blocks()) {
      double s = 0.0;
      for (int j : block) s += witness.q_weights()[static_cast<size_t>(j)] * photons[static_cast<size_t>(j)];
      prod *= s;
    }
    value[static_cast<size_t>(idx)] = prod;
  }

  MeasurementEstimate est;
  est.shots = shots;
  est.seed = seed;
  est.n_max = cutoff.n_max();
  est.mass_deficit = worst_deficit(*dists);
  std::vector<std::vector<double>> cdfs;
  for (const auto& dist : *dists) cdfs.push_back(cumulative(dist.probabilities));
  const std::vector<double> row_cdf = cumulative(witness.lambdas());

  // Shots are split into fixed blocks with their own streams, so the estimate
  // does not depend on how many workers share them.
  constexpr long kShotBlock = 1L << 14;
  const long n_blocks = (shots + kShotBlock - 1) / kShotBlock;
  const int workers =
      static_cast<int>(std::min<long>(options.workers > 0 ? options.workers : thread_count(), n_blocks));
  est.workers = workers;
  std::vector<Partial> parts(static_cast<size_t>(n_blocks));
  parallel_for(parts.size(), workers, [&](size_t b) {
    Partial& part = parts[b];
    part.counts.assign(static_cast<size_t>(m), 0);
    const long begin = static_cast<long>(b) * kShotBlock;
    const long end = std::min(shots, begin + kShotBlock);
    std::mt19937_64 rng(mix_seed(seed, b));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (long s = begin; s < end; ++s) {
      const size_t k = std::min(draw(row_cdf, unit(rng)), static_cast<size_t>(m - 1));
      const std::vector<double>& cdf = cdfs[k];
      const size_t outcome = std::min(draw(cdf, unit(rng)), cdf.size() - 1);
      const double x = value[outcome];
      ++part.counts[k];
      ++part.n;
      const double delta = x - part.mean;
      part.mean += delta / static_cast<double>(part.n);
      part.m2 += delta * (x - part.mean);
    }
  });

  // Chan et al. pairwise merge of the per-block moments, in block order
  Partial total;
  total.counts.assign(static_cast<size_t>(m), 0);
  for (const Partial& p : parts) {
    if (p.n == 0) continue;
    const double n_ab = static_cast<double>(total.n + p.n);
    const double delta = p.mean - total.mean;
    total.m2 += p.m2 + delta * delta * static_cast<double>(total.n) * static_cast<double>(p.n) / n_ab;
    total.mean += delta * static_cast<double>(p.n) / n_ab;
    total.n += p.n;
    for (int k = 0; k < m; ++k) total.counts[static_cast<size_t>(k)] += p.counts[static_cast<size_t>(k)];
  }
  est.mean = total.mean;
  const double variance = shots > 1 ? total.m2 / static_cast<double>(shots - 1) : 0.0;
  est.std_error = std::sqrt(std::max(0.0, variance) / static_cast<double>(shots));
  est.per_k_counts = std::move(total.counts);
  return est;
}

}  // namespace witness_forge
