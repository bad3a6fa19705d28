#include "witness_forge/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "witness_forge/error.hpp"
#include "witness_forge/polynomial.hpp"

namespace witness_forge {

namespace {

constexpr double kHandoffTol = 1e-8;
constexpr double kSweepTol = 1e-12;
constexpr double kDistinctPointTol = 1e-6;
constexpr int kPolishIterations = 30;

// Flattened view of a witness used in the inner loops.
struct Problem {
  int n;
  int m;
  int K;
  const std::vector<double>* lam;
  const std::vector<double>* q;
  const std::vector<std::vector<int>>* blocks;
  const CMatrix* A;
  double scale;
  std::vector<int> block_of;

  explicit Problem(const WitnessSpec& w)
      : n(w.n_modes()),
        m(w.m()),
        K(w.partition().block_count()),
        lam(&w.lambdas()),
        q(&w.q_weights()),
        blocks(&w.partition().blocks()),
        A(&w.displacements()),
        scale(w.scale()),
        block_of(static_cast<size_t>(w.n_modes())) {
    for (int j = 0; j < n; ++j) block_of[static_cast<size_t>(j)] = w.partition().block_of(j);
  }

  double lambda(int k) const { return (*lam)[static_cast<size_t>(k)]; }
  double qw(int j) const { return (*q)[static_cast<size_t>(j)]; }

  // N(k, l) = sum_{j in l} q_j |b_j - alpha_kj|^2
  RMatrix block_norms(const CVector& b) const {
    RMatrix N(m, K);
    for (int k = 0; k < m; ++k) {
      for (int l = 0; l < K; ++l) {
        double s = 0.0;
        for (int j : (*blocks)[static_cast<size_t>(l)]) s += qw(j) * std::norm(b(j) - (*A)(k, j));
        N(k, l) = s;
      }
    }
    return N;
  }

  // lambda_k prod_{l' not in skip} N(k, l')
  double partial_product(const RMatrix& N, int k, int skip1, int skip2 = -1) const {
    double p = lambda(k);
    for (int l = 0; l < K; ++l) {
      if (l != skip1 && l != skip2) p *= N(k, l);
    }
    return p;
  }

  double objective(const CVector& b) const {
    const RMatrix N = block_norms(b);
    double f = 0.0;
    for (int k = 0; k < m; ++k) f += partial_product(N, k, -1);
    return scale * f;
  }

  double residual(const CVector& b) const {
    const RMatrix N = block_norms(b);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      const int l = block_of[static_cast<size_t>(j)];
      Complex g{0.0, 0.0};
      for (int k = 0; k < m; ++k) g += partial_product(N, k, l) * (b(j) - (*A)(k, j));
      worst = std::max(worst, scale * qw(j) * std::abs(g));
    }
    return worst;
  }

  // Exact minimizer over block l; returns false when all weights vanish.
  bool update_block(CVector& b, int l) const {
    const RMatrix N = block_norms(b);
    double wsum = 0.0;
    std::vector<double> w(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
      w[static_cast<size_t>(k)] = partial_product(N, k, l);
      wsum += w[static_cast<size_t>(k)];
    }
    if (!(wsum > 0.0)) return false;
    for (int j : (*blocks)[static_cast<size_t>(l)]) {
      if (qw(j) == 0.0) continue;
      Complex acc{0.0, 0.0};
      for (int k = 0; k < m; ++k) acc += w[static_cast<size_t>(k)] * (*A)(k, j);
      b(j) = acc / wsum;
    }
    return true;
  }

  // Gradient and Hessian in the real coordinates (Re b_0, Im b_0, Re b_1, ...).
  void derivatives(const CVector& b, RVector& g, RMatrix& H) const {
    const RMatrix N = block_norms(b);
    const int d = 2 * n;
    g = RVector::Zero(d);
    H = RMatrix::Zero(d, d);
    auto comp = [](Complex z, int c) { return c == 0 ? z.real() : z.imag(); };
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < n; ++j) {
        const int l = block_of[static_cast<size_t>(j)];
        const double wl = partial_product(N, k, l);
        const Complex dj = b(j) - (*A)(k, j);
        for (int c = 0; c < 2; ++c) {
          g(2 * j + c) += wl * 2.0 * qw(j) * comp(dj, c);
          H(2 * j + c, 2 * j + c) += wl * 2.0 * qw(j);
        }
        for (int j2 = 0; j2 < n; ++j2) {
          const int l2 = block_of[static_cast<size_t>(j2)];
          if (l2 == l) continue;
          const double wll = partial_product(N, k, l, l2);
          const Complex dj2 = b(j2) - (*A)(k, j2);
          for (int c = 0; c < 2; ++c) {
            for (int c2 = 0; c2 < 2; ++c2) {
              H(2 * j + c, 2 * j2 + c2) += wll * 4.0 * qw(j) * qw(j2) * comp(dj, c) * comp(dj2, c2);
            }
          }
        }
      }
    }
    g *= scale;
    H *= scale;
  }
};

// Newton iterations with a pseudo-inverse of the Hessian, accepted only while
// they reduce the stationarity defect without raising the objective.
void polish(const Problem& p, CVector& b) {
  double res = p.residual(b);
  double f = p.objective(b);
  for (int it = 0; it < kPolishIterations && res > 0.0; ++it) {
    RVector g;
    RMatrix H;
    p.derivatives(b, g, H);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(H);
    const RVector& ev = es.eigenvalues();
    const double cut = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    RVector coeff = es.eigenvectors().transpose() * g;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) = std::abs(ev(i)) > cut ? coeff(i) / std::abs(ev(i)) : 0.0;
    const RVector step = -(es.eigenvectors() * coeff);
    CVector trial = b;
    for (int j = 0; j < p.n; ++j) trial(j) += Complex{step(2 * j), step(2 * j + 1)};
    const double res2 = p.residual(trial);
    const double f2 = p.objective(trial);
    if (!(res2 < res) || f2 > f + kSweepTol * std::max(1.0, f)) break;
    b = trial;
    res = res2;
    f = f2;
  }
}

std::vector<CVector> seed_points(const Problem& p, int n_starts, std::uint64_t seed) {
  std::vector<CVector> seeds;
  auto push = [&](CVector v) {
    if (static_cast<int>(seeds.size()) < n_starts) seeds.push_back(std::move(v));
  };
  CVector mean = CVector::Zero(p.n);
  for (int k = 0; k < p.m; ++k) mean += p.lambda(k) * p.A->row(k).transpose();
  push(mean);
  for (int k = 0; k < p.m; ++k) push(p.A->row(k).transpose());
  // block l takes row (l + s) mod m: always contains a zero when m <= K
  for (int s = 0; s < p.m; ++s) {
    CVector v(p.n);
    for (int j = 0; j < p.n; ++j) v(j) = (*p.A)((p.block_of[static_cast<size_t>(j)] + s) % p.m, j);
    push(std::move(v));
  }
  double combos = std::pow(static_cast<double>(p.m), p.K);
  if (combos <= n_starts) {
    std::vector<int> pick(static_cast<size_t>(p.K), 0);
    for (long c = 0; c < static_cast<long>(combos); ++c) {
      long rem = c;
      for (int l = 0; l < p.K; ++l) {
        pick[static_cast<size_t>(l)] = static_cast<int>(rem % p.m);
        rem /= p.m;
      }
      CVector v(p.n);
      for (int j = 0; j < p.n; ++j) v(j) = (*p.A)(pick[static_cast<size_t>(p.block_of[static_cast<size_t>(j)])], j);
      push(std::move(v));
    }
  }
  // random points in the padded bounding box of the displacements
  const RMatrix re = p.A->real();
  const RMatrix im = p.A->imag();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<int>(seeds.size()) < n_starts) {
    CVector v(p.n);
    for (int j = 0; j < p.n; ++j) {
      const double rlo = re.col(j).minCoeff(), rhi = re.col(j).maxCoeff();
      const double ilo = im.col(j).minCoeff(), ihi = im.col(j).maxCoeff();
      const double pad = 0.25 * std::max({rhi - rlo, ihi - ilo, 1e-3});
      v(j) = Complex{rlo - pad + (rhi - rlo + 2 * pad) * unit(rng), ilo - pad + (ihi - ilo + 2 * pad) * unit(rng)};
    }
    seeds.push_back(std::move(v));
  }
  return seeds;
}

void insert_distinct(std::vector<StationaryPoint>& points, StationaryPoint candidate) {
  for (const auto& pt : points) {
    if ((pt.amplitudes - candidate.amplitudes).cwiseAbs().maxCoeff() < kDistinctPointTol) return;
  }
  points.push_back(std::move(candidate));
}

void finalize(SevSolution& sol, const Problem& p) {
  std::sort(sol.stationary_points.begin(), sol.stationary_points.end(),
            [](const StationaryPoint& a, const StationaryPoint& b) { return a.value < b.value; });
  sol.argmin = sol.stationary_points.front().amplitudes;
  sol.g_min = p.objective(sol.argmin);
  sol.residual = p.residual(sol.argmin);
}

void validate_etas(const WitnessSpec& w, std::span<const double> etas) {
  if (static_cast<int>(etas.size()) != w.n_modes()) {
    fail(ErrorCode::ModelMismatch, "expected " + std::to_string(w.n_modes()) + " efficiencies, got " +
                                       std::to_string(etas.size()));
  }
  for (double eta : etas) {
    if (eta == 0.0) fail(ErrorCode::ZeroEfficiency, "detection efficiency must be nonzero");
    if (!(eta > 0.0 && eta <= 1.0)) fail(ErrorCode::InvalidArgument, "efficiencies must lie in (0, 1]");
  }
}

// Common phase of a set of amplitudes if they lie on one line through the
// origin, e^{i phi} with the amplitudes real multiples of it.
std::optional<Complex> common_axis(const CVector& z, double tol) {
  Eigen::Index big = 0;
  z.cwiseAbs().maxCoeff(&big);
  if (std::abs(z(big)) == 0.0) return Complex{1.0, 0.0};
  const Complex u = z(big) / std::abs(z(big));
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (std::abs((z(i) * std::conj(u)).imag()) > tol * (1.0 + std::abs(z(i)))) return std::nullopt;
  }
  return u;
}

}  // namespace

std::string_view to_string(SevMethod method) {
  switch (method) {
    case SevMethod::MultistartAlternating: return "multistart_alternating";
    case SevMethod::CollinearQuintic: return "collinear_quintic";
  }
  return "unknown";
}

SingleModeCollapse collapse_single_mode(std::span<const double> lambdas, std::span<const Complex> alphas) {
  if (lambdas.size() != alphas.size() || lambdas.empty()) {
    fail(ErrorCode::InvalidArgument, "collapse needs matching, non-empty lambda and alpha lists");
  }
  Complex mean{0.0, 0.0};
  for (size_t k = 0; k < lambdas.size(); ++k) mean += lambdas[k] * alphas[k];
  double offset = 0.0;
  for (size_t k = 0; k < lambdas.size(); ++k) offset += lambdas[k] * std::norm(alphas[k] - mean);
  return {mean, offset};
}

double sev_objective(const WitnessSpec& witness, const CVector& amplitudes) {
  if (amplitudes.size() != witness.n_modes()) {
    fail(ErrorCode::ModelMismatch, "expected " + std::to_string(witness.n_modes()) + " amplitudes, got " +
                                       std::to_string(amplitudes.size()));
  }
  return Problem(witness).objective(amplitudes);
}

CVector alternating_update(const WitnessSpec& witness, const CVector& amplitudes, int block) {
  if (amplitudes.size() != witness.n_modes()) fail(ErrorCode::ModelMismatch, "amplitude count mismatch");
  if (block < 0 || block >= witness.partition().block_count()) {
    fail(ErrorCode::InvalidArgument, "block index " + std::to_string(block) + " out of range");
  }
  CVector b = amplitudes;
  if (!Problem(witness).update_block(b, block)) {
    fail(ErrorCode::DegenerateWeights, "all block weights vanish; objective is already zero");
  }
  return b;
}

double stationarity_residual(const WitnessSpec& witness, const CVector& amplitudes) {
  if (amplitudes.size() != witness.n_modes()) fail(ErrorCode::ModelMismatch, "amplitude count mismatch");
  return Problem(witness).residual(amplitudes);
}

SevSolution solve_sev_multistart(const WitnessSpec& witness, int n_starts, std::uint64_t seed) {
  if (n_starts < 1) fail(ErrorCode::InvalidArgument, "n_starts must be >= 1");
  const Problem p(witness);
  SevSolution sol;
  sol.method = SevMethod::MultistartAlternating;
  for (CVector b : seed_points(p, n_starts, seed)) {
    double f = p.objective(b);
    bool converged = false;
    bool polished = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      for (int l = 0; l < p.K; ++l) p.update_block(b, l);  // degenerate weights: keep block
      const double f2 = p.objective(b);
      const double change = std::abs(f - f2);
      f = f2;
      if (change < kSweepTol * std::max(1.0, f)) {
        converged = true;
        break;
      }
      // near a flat minimum the sweeps converge slowly; Newton finishes it
      if (!polished && change < kHandoffTol * std::max(1.0, f)) {
        polish(p, b);
        f = p.objective(b);
        polished = true;
      }
    }
    if (!converged) {
      fail(ErrorCode::NotConverged, "block updates did not settle within " + std::to_string(kMaxSweeps) + " sweeps");
    }
    polish(p, b);
    ++sol.starts_used;
    insert_distinct(sol.stationary_points, {b, p.objective(b)});
  }
  finalize(sol, p);
  return sol;
}

bool is_collinear_m3(const WitnessSpec& w, double tol) {
  if (w.m() != 3 || w.n_modes() != 2 || w.partition().block_count() != 2) return false;
  if (w.q_weights()[0] <= 0.0 || w.q_weights()[1] <= 0.0) return false;
  return common_axis(w.displacements().col(0), tol) && common_axis(w.displacements().col(1), tol);
}

SevSolution solve_sev_collinear_m3(const WitnessSpec& w) {
  if (!is_collinear_m3(w)) {
    fail(ErrorCode::NotCollinear, "quintic route needs a bipartite m=3 witness with collinear alpha and beta rows");
  }
  const Complex ua = *common_axis(w.displacements().col(0), 1e-10);
  const Complex ub = *common_axis(w.displacements().col(1), 1e-10);
  double a[3], b[3], l[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = (w.displacement(k, 0) * std::conj(ua)).real();
    b[k] = (w.displacement(k, 1) * std::conj(ub)).real();
    l[k] = w.lambdas()[static_cast<size_t>(k)];
  }
  // R_{s j} = sum_k lambda_k (a_k - a_j) b_k^s
  auto R = [&](int s, int j) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) acc += l[k] * (a[k] - a[j]) * std::pow(b[k], s);
    return acc;
  };
  double c[6] = {0, 0, 0, 0, 0, 0};
  for (int k = 0; k < 3; ++k) {
    const double r0 = R(0, k), r1 = R(1, k), r2 = R(2, k);
    c[0] += -l[k] * r2 * r2 * b[k];
    c[1] += l[k] * r2 * (r2 + 4 * r1 * b[k]);
    c[2] += -2 * l[k] * ((2 * r1 * r1 + r2 * r0) * b[k] + 2 * r1 * r2);
    c[3] += 2 * l[k] * (2 * r1 * r1 + r2 * r0 + 2 * r1 * r0 * b[k]);
    c[4] += -l[k] * r0 * (r0 * b[k] + 4 * r1);
    c[5] += l[k] * r0 * r0;
  }
  double cmax = 0.0;
  for (double ci : c) cmax = std::max(cmax, std::abs(ci));
  if (cmax == 0.0) fail(ErrorCode::NoRealRoot, "stationarity polynomial vanishes identically");
  const std::vector<double> roots = real_polynomial_roots(std::span<const double>(c, 6));
  if (roots.empty()) fail(ErrorCode::NoRealRoot, "stationarity polynomial has no real root");

  const Problem p(w);
  SevSolution sol;
  sol.method = SevMethod::CollinearQuintic;
  for (double beta : roots) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double wk = l[k] * (beta - b[k]) * (beta - b[k]);
      num += wk * a[k];
      den += wk;
    }
    const double alpha = den > 0.0 ? num / den : a[0];
    CVector amp(2);
    amp << alpha * ua, beta * ub;
    insert_distinct(sol.stationary_points, {amp, p.objective(amp)});
  }
  sol.starts_used = static_cast<int>(roots.size());
  finalize(sol, p);
  return sol;
}

SevSolution solve_sev(const WitnessSpec& witness, const SevOptions& options) {
  SevSolution best = solve_sev_multistart(witness, options.n_starts, options.seed);
  if (options.use_quintic_when_collinear && is_collinear_m3(witness)) {
    try {
      SevSolution exact = solve_sev_collinear_m3(witness);
      if (exact.g_min < best.g_min) {
        exact.starts_used += best.starts_used;
        return exact;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoRealRoot) throw;
    }
  }
  return best;
}

WitnessSpec apply_loss(const WitnessSpec& witness, std::span<const double> etas) {
  validate_etas(witness, etas);
  CMatrix d = witness.displacements();
  std::vector<double> q = witness.q_weights();
  for (int j = 0; j < witness.n_modes(); ++j) {
    d.col(j) /= std::sqrt(etas[static_cast<size_t>(j)]);
    q[static_cast<size_t>(j)] *= etas[static_cast<size_t>(j)];
  }
  return WitnessSpec(witness.partition(), witness.lambdas(), std::move(d), std::move(q), witness.scale());
}

WitnessSpec compensate_for_loss(const WitnessSpec& witness, std::span<const double> etas) {
  validate_etas(witness, etas);
  CMatrix d = witness.displacements();
  for (int j = 0; j < witness.n_modes(); ++j) d.col(j) *= std::sqrt(etas[static_cast<size_t>(j)]);
  return witness.with_displacements(std::move(d));
}

double affine_rescale(double g_min, double mu, double nu) {
  if (!(mu > 0.0)) fail(ErrorCode::NonpositiveScale, "affine scale mu must be positive");
  return mu * g_min + nu;
}

SevSolution affine_rescale(const SevSolution& solution, double mu, double nu) {
  SevSolution out = solution;
  out.g_min = affine_rescale(solution.g_min, mu, nu);
  for (auto& pt : out.stationary_points) pt.value = mu * pt.value + nu;
  out.residual = mu * solution.residual;
  return out;
}

EvaluationReport make_report(double expectation, double g_min) {
  EvaluationReport r;
  r.expectation = expectation;
  r.g_min = g_min;
  r.witness_value = expectation - g_min;
  r.entangled = r.witness_value < 0.0;
  if (expectation > 0.0) r.margin_relative = g_min / expectation - 1.0;
  return r;
}

EvaluationReport evaluate(const WitnessSpec& witness, const StateModel& state, const SevOptions& options) {
  const double expectation = expectation_L(state, witness);
  return make_report(expectation, solve_sev(witness, options).g_min);
}

}  // namespace witness_forge
