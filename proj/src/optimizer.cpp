#include "witness_forge/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "witness_forge/error.hpp"
#include "witness_forge/parallel.hpp"
#include "witness_forge/presets.hpp"

namespace witness_forge {

namespace {

constexpr double kRowSeparation = 1e-6;
constexpr size_t kPolishFromInitial = 3;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<GeneBounds> expand_bounds(const GaConfig& config, int n_genes) {
  if (config.bounds.size() == 1) return std::vector<GeneBounds>(static_cast<size_t>(n_genes), config.bounds.front());
  if (static_cast<int>(config.bounds.size()) != n_genes) {
    fail(ErrorCode::InvalidArgument, "bounds list has " + std::to_string(config.bounds.size()) +
                                         " entries for " + std::to_string(n_genes) + " genes");
  }
  return config.bounds;
}

double fitness(const StateModel& state, const WitnessAnsatz& ansatz, std::span<const double> genes, int starts,
               std::uint64_t seed) {
  try {
    const WitnessSpec w = ansatz.decode(genes);
    const double expectation = expectation_L(state, w);
    const double g_min = solve_sev(w, {starts, seed, true}).g_min;
    const double value = expectation - g_min;
    return std::isfinite(value) ? value : kInf;
  } catch (const Error&) {
    return kInf;
  }
}

void check_grid(std::span<const double> grid) {
  if (grid.empty()) fail(ErrorCode::InvalidArgument, "parameter grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) fail(ErrorCode::InvalidArgument, "parameter grid must be sorted");
}

double bisect(const std::function<double(double)>& value, double lo, double hi, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "bisection tolerance must be positive");
  if (!(lo < hi)) fail(ErrorCode::InvalidArgument, "bisection interval must satisfy lo < hi");
  double f_lo = value(lo);
  const double f_hi = value(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    fail(ErrorCode::NoSignChange, "witness value has the same sign at both ends (" + std::to_string(f_lo) + ", " +
                                      std::to_string(f_hi) + ")");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = value(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Bounded Nelder-Mead, restarted from the incumbent with a shrinking simplex
// until the evaluation budget is spent. Returns the best point found.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                double f0, const std::vector<GeneBounds>& bounds, int budget) {
  const size_t n = x0.size();
  auto clamp = [&](std::vector<double> x) {
    for (size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], bounds[i].lo, bounds[i].hi);
    return x;
  };
  int used = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++used;
    return f(x);
  };
  std::vector<double> best = x0;
  double best_f = f0;
  double step = 0.05;
  while (used < budget && step > 1e-6) {
    std::vector<std::vector<double>> pts{best};
    std::vector<double> vals{best_f};
    for (size_t i = 0; i < n; ++i) {
      std::vector<double> x = best;
      const double width = bounds[i].hi - bounds[i].lo;
      x[i] += (x[i] + step * width <= bounds[i].hi) ? step * width : -step * width;
      pts.push_back(clamp(x));
      vals.push_back(eval(pts.back()));
    }
    const double start_f = best_f;
    std::vector<size_t> idx(n + 1);
    while (used < budget) {
      std::iota(idx.begin(), idx.end(), size_t{0});
      std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return vals[a] < vals[b]; });
      const size_t lo = idx.front(), hi = idx.back(), second = idx[n - 1];
      if (std::abs(vals[hi] - vals[lo]) <= 1e-12 * (1.0 + std::abs(vals[lo]))) break;
      std::vector<double> centroid(n, 0.0);
      for (size_t k : idx) {
        if (k == hi) continue;
        for (size_t i = 0; i < n; ++i) centroid[i] += pts[k][i] / static_cast<double>(n);
      }
      auto along = [&](double t) {
        std::vector<double> x(n);
        for (size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (pts[hi][i] - centroid[i]);
        return clamp(x);
      };
      const std::vector<double> xr = along(-1.0);
      const double fr = eval(xr);
      if (fr < vals[lo]) {
        const std::vector<double> xe = along(-2.0);
        const double fe = eval(xe);
        pts[hi] = fe < fr ? xe : xr;
        vals[hi] = std::min(fe, fr);
      } else if (fr < vals[second]) {
        pts[hi] = xr;
        vals[hi] = fr;
      } else {
        const std::vector<double> xc = fr < vals[hi] ? along(-0.5) : along(0.5);
        const double fc = eval(xc);
        if (fc < std::min(fr, vals[hi])) {
          pts[hi] = xc;
          vals[hi] = fc;
        } else {
          for (size_t k : idx) {
            if (k == lo) continue;
            for (size_t i = 0; i < n; ++i) pts[k][i] = pts[lo][i] + 0.5 * (pts[k][i] - pts[lo][i]);
            vals[k] = eval(pts[k]);
          }
        }
      }
    }
    for (size_t k = 0; k <= n; ++k) {
      if (vals[k] < best_f) {
        best_f = vals[k];
        best = pts[k];
      }
    }
    if (!(best_f < start_f - 1e-12 * (1.0 + std::abs(start_f)))) step *= 0.25;
  }
  return best;
}

}  // namespace

void GaConfig::validate() const {
  if (population < 4) fail(ErrorCode::InvalidArgument, "population must be >= 4");
  if (elite_count < 0 || elite_count >= population) {
    fail(ErrorCode::InvalidArgument, "elite_count must lie in [0, population)");
  }
  if (generations < 0) fail(ErrorCode::InvalidArgument, "generations must be >= 0");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "crossover_rate must lie in [0, 1]");
  }
  if (!(mutation_sigma >= 0.0) || !(mutation_decay > 0.0)) {
    fail(ErrorCode::InvalidArgument, "mutation_sigma must be >= 0 and mutation_decay > 0");
  }
  if (tournament_size < 1) fail(ErrorCode::InvalidArgument, "tournament_size must be >= 1");
  if (polish_evaluations < 0) fail(ErrorCode::InvalidArgument, "polish_evaluations must be >= 0");
  if (fitness_starts < 1 || report_starts < 1) fail(ErrorCode::InvalidArgument, "solver starts must be >= 1");
  if (bounds.empty()) fail(ErrorCode::InvalidArgument, "gene bounds must not be empty");
  for (const auto& b : bounds) {
    if (!(b.lo < b.hi)) fail(ErrorCode::InvalidArgument, "gene bounds need lo < hi");
  }
}

CMatrix separate_rows(CMatrix d) {
  for (Eigen::Index k2 = 1; k2 < d.rows(); ++k2) {
    for (Eigen::Index k = 0; k < k2; ++k) {
      while ((d.row(k) - d.row(k2)).cwiseAbs().maxCoeff() < kRowSeparation) {
        d(k2, 0) += Complex{2.0 * kRowSeparation, 0.0};
        k = -1;  // recheck against every earlier row
        break;
      }
    }
  }
  return d;
}

WitnessAnsatz displacement_ansatz(const PartitionSpec& partition, int m, const GaConfig& config) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "m must be >= 1");
  const int n = partition.n_modes();
  std::vector<Complex> axes;
  if (config.collinear_phases) {
    if (static_cast<int>(config.collinear_phases->size()) != n) {
      fail(ErrorCode::InvalidArgument, "collinear_phases needs one phase per mode");
    }
    for (double phi : *config.collinear_phases) axes.push_back(std::polar(1.0, phi));
  }
  const int per_entry = axes.empty() ? 2 : 1;
  const int n_disp = m * n * per_entry;
  const bool lambdas = config.optimize_lambdas;
  WitnessAnsatz ansatz;
  ansatz.n_genes = n_disp + (lambdas ? m : 0);
  ansatz.decode = [partition, m, n, axes, per_entry, n_disp, lambdas](std::span<const double> g) {
    CMatrix d(m, n);
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < n; ++j) {
        const size_t at = static_cast<size_t>((k * n + j) * per_entry);
        d(k, j) = axes.empty() ? Complex{g[at], g[at + 1]} : g[at] * axes[static_cast<size_t>(j)];
      }
    }
    std::vector<double> lam(static_cast<size_t>(m), 1.0 / m);
    if (lambdas) {
      const double top = *std::max_element(g.begin() + n_disp, g.end());
      double sum = 0.0;
      for (int k = 0; k < m; ++k) sum += lam[static_cast<size_t>(k)] = std::exp(g[static_cast<size_t>(n_disp + k)] - top);
      for (double& l : lam) l /= sum;
      // exact unit sum for the witness invariant
      lam.back() = 1.0 - std::accumulate(lam.begin(), lam.end() - 1, 0.0);
    }
    return WitnessSpec(partition, std::move(lam), separate_rows(std::move(d)));
  };
  return ansatz;
}

GaResult ga_optimize(const StateModel& state, const PartitionSpec& partition, int m, const GaConfig& config) {
  if (m <= partition.block_count()) {
    std::cerr << "warning: m = " << m << " does not exceed the number of blocks (" << partition.block_count()
              << "); the separability bound is zero and no entanglement can be certified\n";
  }
  return ga_optimize(state, displacement_ansatz(partition, m, config), config);
}

GaResult ga_optimize(const StateModel& state, const WitnessAnsatz& ansatz, const GaConfig& config) {
  config.validate();
  if (ansatz.n_genes < 1 || !ansatz.decode) fail(ErrorCode::InvalidArgument, "ansatz needs at least one gene");
  const auto n_genes = static_cast<size_t>(ansatz.n_genes);
  const auto pop = static_cast<size_t>(config.population);
  const std::vector<GeneBounds> bounds = expand_bounds(config, ansatz.n_genes);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<double>> genomes(pop, std::vector<double>(n_genes));
  for (auto& genome : genomes) {
    for (size_t g = 0; g < n_genes; ++g) genome[g] = bounds[g].lo + (bounds[g].hi - bounds[g].lo) * unit(rng);
  }
  std::vector<double> fit(pop, kInf);
  std::vector<bool> known(pop, false);
  std::vector<std::vector<double>> initial;

  auto evaluate_population = [&](int generation) {
    parallel_for(pop, config.threads, [&](size_t i) {
      if (known[i]) return;
      const std::uint64_t stream = static_cast<std::uint64_t>(generation) * pop + i;
      fit[i] = fitness(state, ansatz, genomes[i], config.fitness_starts, mix_seed(config.seed, stream));
    });
    std::fill(known.begin(), known.end(), true);
  };

  auto tournament = [&](const std::vector<size_t>& order) -> const std::vector<double>& {
    // order[rank] = index; lower rank is fitter
    size_t best_rank = pop;
    for (int t = 0; t < config.tournament_size; ++t) {
      best_rank = std::min(best_rank, static_cast<size_t>(unit(rng) * static_cast<double>(pop)) % pop);
    }
    return genomes[order[best_rank]];
  };

  GaResult result{ansatz.decode(genomes.front()), {}, {}, 0.0, {}, {}};
  double sigma = config.mutation_sigma;
  std::vector<size_t> order(pop);
  for (int generation = 0;; ++generation) {
    evaluate_population(generation);
    if (generation == 0) {
      result.initial_fitness = fit;
      initial = genomes;
    }
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return fit[a] < fit[b]; });
    result.best_history.push_back(fit[order.front()]);
    if (generation == config.generations) break;

    std::vector<std::vector<double>> next;
    std::vector<double> next_fit;
    next.reserve(pop);
    for (int e = 0; e < config.elite_count; ++e) {
      next.push_back(genomes[order[static_cast<size_t>(e)]]);
      next_fit.push_back(fit[order[static_cast<size_t>(e)]]);
    }
    while (next.size() < pop) {
      const auto& p1 = tournament(order);
      const auto& p2 = tournament(order);
      std::vector<double> child = p1;
      if (unit(rng) < config.crossover_rate) {
        for (size_t g = 0; g < n_genes; ++g) {
          if (unit(rng) < 0.5) child[g] = p2[g];
        }
      }
      for (size_t g = 0; g < n_genes; ++g) {
        child[g] = std::clamp(child[g] + sigma * normal(rng), bounds[g].lo, bounds[g].hi);
      }
      next.push_back(std::move(child));
      next_fit.push_back(kInf);
    }
    genomes = std::move(next);
    fit = std::move(next_fit);
    for (size_t i = 0; i < pop; ++i) known[i] = i < static_cast<size_t>(config.elite_count);
    sigma *= config.mutation_decay;
  }

  result.genes = genomes[order.front()];
  result.best_fitness = fit[order.front()];
  if (config.polish_evaluations > 0) {
    // The final population often sits in one basin, so the best few genomes
    // of the first generation are refined as well.
    const std::uint64_t polish_seed = mix_seed(config.seed, ~std::uint64_t{0});
    auto f = [&](const std::vector<double>& g) {
      return fitness(state, ansatz, g, config.fitness_starts, polish_seed);
    };
    std::vector<std::vector<double>> starts{result.genes};
    std::vector<size_t> first(pop);
    std::iota(first.begin(), first.end(), size_t{0});
    std::stable_sort(first.begin(), first.end(),
                     [&](size_t a, size_t b) { return result.initial_fitness[a] < result.initial_fitness[b]; });
    for (size_t i = 0; i < std::min<size_t>(kPolishFromInitial, pop); ++i) starts.push_back(initial[first[i]]);

    const double f0 = f(result.genes);
    double best = f0;
    std::vector<double> best_genes = result.genes;
    for (const auto& x0 : starts) {
      const double fx = f(x0);
      if (!std::isfinite(fx)) continue;
      std::vector<double> polished = nelder_mead(f, x0, fx, bounds, config.polish_evaluations);
      const double fp = f(polished);
      if (fp < best) {
        best = fp;
        best_genes = std::move(polished);
      }
    }
    if (best < f0) {
      result.genes = std::move(best_genes);
      result.best_fitness = std::min(result.best_fitness, best);
    }
  }
  result.witness = ansatz.decode(result.genes);
  result.report = evaluate(result.witness, state, {config.report_starts, config.seed, true});
  return result;
}

SweepResult sweep(const StateFamily& states, const WitnessSpec& witness, std::span<const double> grid,
                  const SevOptions& options, int threads) {
  check_grid(grid);
  const double g_min = solve_sev(witness, options).g_min;
  SweepResult out;
  out.rows.resize(grid.size());
  parallel_for(grid.size(), threads, [&](size_t i) {
    const double expectation = expectation_L(states(grid[i]), witness);
    out.rows[i] = {grid[i], expectation, g_min, expectation - g_min};
  });
  return out;
}

SweepResult sweep(const StateFamily& states, const WitnessFamily& witnesses, std::span<const double> grid,
                  const SevOptions& options, int threads) {
  check_grid(grid);
  SweepResult out;
  out.rows.resize(grid.size());
  parallel_for(grid.size(), threads, [&](size_t i) {
    const EvaluationReport r = evaluate(witnesses(grid[i]), states(grid[i]), options);
    out.rows[i] = {grid[i], r.expectation, r.g_min, r.witness_value};
  });
  return out;
}

double bisect_critical(const StateFamily& states, const WitnessSpec& witness, double lo, double hi, double tol,
                       const SevOptions& options) {
  const double g_min = solve_sev(witness, options).g_min;
  return bisect([&](double p) { return expectation_L(states(p), witness) - g_min; }, lo, hi, tol);
}

double bisect_critical(const StateFamily& states, const WitnessFamily& witnesses, double lo, double hi, double tol,
                       const SevOptions& options) {
  return bisect([&](double p) { return evaluate(witnesses(p), states(p), options).witness_value; }, lo, hi, tol);
}

RadiusAnalysis radius_analysis(Complex xi, std::span<const double> r_grid, const SevOptions& options) {
  if (xi == Complex{}) fail(ErrorCode::InvalidArgument, "radius analysis needs xi != 0");
  check_grid(r_grid);
  auto relative_margin = [&](double r) {
    const EvaluationReport rep = evaluate(presets::tmsv_circle_witness(r, xi), Tmsv{xi}, options);
    return rep.margin_relative.value_or(-kInf);
  };
  std::vector<double> R(r_grid.size());
  parallel_for(r_grid.size(), 0, [&](size_t i) { R[i] = relative_margin(r_grid[i]); });
  const auto best = static_cast<size_t>(std::max_element(R.begin(), R.end()) - R.begin());
  double step = 0.0;
  if (best > 0) step = std::max(step, r_grid[best] - r_grid[best - 1]);
  if (best + 1 < r_grid.size()) step = std::max(step, r_grid[best + 1] - r_grid[best]);

  RadiusAnalysis out;
  out.r_crit = presets::tmsv_r_crit(xi);
  out.r_max = presets::tmsv_r_max(xi);
  out.r_best = r_grid[best];
  out.R_best = R[best];
  out.R_at_r_max = relative_margin(out.r_max);
  out.grid_step = step;
  return out;
}

}  // namespace witness_forge
