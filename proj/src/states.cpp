#include "witness_forge/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "witness_forge/error.hpp"

namespace witness_forge {

namespace {

constexpr double kNormFloor = 1e-12;
constexpr double kStateDeficitTol = 1e-6;
constexpr double kAutoDeficitTol = 1e-8;
constexpr double kAutoExpectationTol = 1e-6;
constexpr double kQuadratureTol = 1e-6;
constexpr long kMaxDenseDim = 4096;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// log <delta|gamma> for single-mode coherent states
Complex log_overlap(Complex delta, Complex gamma) {
  return -0.5 * std::norm(delta) - 0.5 * std::norm(gamma) + std::conj(delta) * gamma;
}

// Visits every way of choosing one mode per block and hands the selected
// mode set (bitmask over modes) and its q-product to fn.
template <class Fn>
void for_each_selection(const WitnessSpec& w, Fn&& fn) {
  const auto& blocks = w.partition().blocks();
  const auto& q = w.q_weights();
  std::vector<size_t> idx(blocks.size(), 0);
  while (true) {
    unsigned long mask = 0;
    double qprod = 1.0;
    for (size_t l = 0; l < blocks.size(); ++l) {
      const int j = blocks[l][idx[l]];
      mask |= 1ul << j;
      qprod *= q[static_cast<size_t>(j)];
    }
    fn(mask, qprod);
    size_t l = 0;
    for (; l < blocks.size(); ++l) {
      if (++idx[l] < blocks[l].size()) break;
      idx[l] = 0;
    }
    if (l == blocks.size()) return;
  }
}

void require_modes(const StateModel& state, const WitnessSpec& witness) {
  const int ns = mode_count(state);
  if (ns != witness.n_modes()) {
    fail(ErrorCode::ModelMismatch, "state has " + std::to_string(ns) + " modes but the witness has " +
                                       std::to_string(witness.n_modes()));
  }
}

// <L> for a two-mode state given its displaced correlation and the two
// single-mode displaced photon numbers.
template <class Pair, class SingleA, class SingleB>
double two_mode_expectation(const WitnessSpec& w, Pair&& pair, SingleA&& single_a, SingleB&& single_b) {
  double total = 0.0;
  for (int k = 0; k < w.m(); ++k) {
    const Complex a = w.displacement(k, 0);
    const Complex b = w.displacement(k, 1);
    double term = 0.0;
    for_each_selection(w, [&](unsigned long mask, double qprod) {
      if (mask == 0b11) term += qprod * pair(a, b);
      else if (mask == 0b01) term += qprod * single_a(a);
      else term += qprod * single_b(b);
    });
    total += w.lambdas()[static_cast<size_t>(k)] * term;
  }
  return w.scale() * total;
}

CVector coherent_vector(Complex gamma, FockCutoff cutoff) {
  CVector v(cutoff.dim());
  v(0) = std::exp(-0.5 * std::norm(gamma));
  for (int n = 1; n < cutoff.dim(); ++n) v(n) = v(n - 1) * gamma / std::sqrt(static_cast<double>(n));
  return v;
}

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

double coherent_norm2(const CoherentSuperposition& s) {
  Complex norm{0.0, 0.0};
  for (const auto& ts : s.terms) {
    for (const auto& tt : s.terms) {
      Complex lo{0.0, 0.0};
      for (int j = 0; j < s.n_modes; ++j) lo += log_overlap(ts.amplitudes[static_cast<size_t>(j)], tt.amplitudes[static_cast<size_t>(j)]);
      norm += std::conj(ts.coeff) * tt.coeff * std::exp(lo);
    }
  }
  return norm.real();
}

// Truncated state vector and its deficit for the pure families.
struct PureImage {
  CVector psi;
  double deficit;
};

PureImage coherent_image(const CoherentSuperposition& s, FockCutoff cutoff) {
  const double norm2 = coherent_norm2(s);
  if (!(norm2 > kNormFloor)) fail(ErrorCode::DegenerateNorm, "coherent superposition has vanishing norm");
  CVector psi = CVector::Zero(fock_dimension(s.n_modes, cutoff));
  for (const auto& t : s.terms) {
    CVector v = coherent_vector(t.amplitudes[0], cutoff);
    for (int j = 1; j < s.n_modes; ++j) v = kron(v, coherent_vector(t.amplitudes[static_cast<size_t>(j)], cutoff));
    psi += t.coeff * v;
  }
  psi /= std::sqrt(norm2);
  return {psi, std::max(0.0, 1.0 - psi.squaredNorm())};
}

CVector tmsv_vector(Complex xi, FockCutoff cutoff) {
  const int d = cutoff.dim();
  const double r = std::abs(xi);
  const Complex ratio = -std::polar(std::tanh(r), phase_of(xi));
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(d) * d);
  Complex amp = 1.0 / std::cosh(r);
  for (int n = 0; n < d; ++n) {
    psi(n * d + n) = amp;
    amp *= ratio;
  }
  return psi;
}

PureImage tmsv_image(const Tmsv& s, FockCutoff cutoff) {
  const double t2 = std::pow(std::tanh(std::abs(s.xi)), 2);
  return {tmsv_vector(s.xi, cutoff), std::pow(t2, cutoff.dim())};
}

PureImage subtracted_image(const PhotonSubtractedTmsv& s, FockCutoff cutoff) {
  const double norm2 = std::pow(std::sinh(std::abs(s.xi)), 2);
  if (!(norm2 > kNormFloor)) fail(ErrorCode::DegenerateNorm, "photon subtraction from the vacuum (xi = 0)");
  const int d = cutoff.dim();
  const CVector t = tmsv_vector(s.xi, cutoff);
  CVector psi = CVector::Zero(t.size());
  const double ca = std::sqrt(s.kappa);
  const double cb = std::sqrt(1.0 - s.kappa);
  for (int n = 1; n < d; ++n) {
    const Complex c = t(n * d + n) * std::sqrt(static_cast<double>(n));
    psi((n - 1) * d + n) += ca * c;  // a|n,n> = sqrt(n)|n-1,n>
    psi(n * d + (n - 1)) += cb * c;  // b|n,n> = sqrt(n)|n,n-1>
  }
  psi /= std::sqrt(norm2);
  return {psi, std::max(0.0, 1.0 - psi.squaredNorm())};
}

// Quadrature nodes of the noise distribution at the fixed default order.
template <class Fn>
void for_each_noise_node(Complex gamma, double sigma, int order, Fn&& fn) {
  const QuadratureRule rule = QuadratureRule::gauss_hermite(order);
  const double spread = std::sqrt(2.0) * sigma;
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) {
      const double w = rule.weights()[static_cast<size_t>(i)] * rule.weights()[static_cast<size_t>(j)] / kPi;
      fn(gamma + spread * Complex{rule.nodes()[static_cast<size_t>(i)], rule.nodes()[static_cast<size_t>(j)]}, w);
    }
  }
}

DensityMatrix recut(const DensityMatrix& rho, FockCutoff cutoff, double* deficit) {
  const int n = rho.n_modes();
  const int d_old = rho.cutoff().dim();
  const int d_new = cutoff.dim();
  const long dim_new = fock_dimension(n, cutoff);
  // map new multi-index -> old flat index (or -1 if outside)
  std::vector<long> map(static_cast<size_t>(dim_new));
  for (long i = 0; i < dim_new; ++i) {
    long rem = i;
    long old = 0;
    long place = 1;
    bool inside = true;
    for (int j = n - 1; j >= 0; --j) {
      const long digit = rem % d_new;
      rem /= d_new;
      if (digit >= d_old) inside = false;
      old += digit * place;
      place *= d_old;
    }
    map[static_cast<size_t>(i)] = inside ? old : -1;
  }
  CMatrix out = CMatrix::Zero(dim_new, dim_new);
  for (long r = 0; r < dim_new; ++r) {
    if (map[static_cast<size_t>(r)] < 0) continue;
    for (long c = 0; c < dim_new; ++c) {
      if (map[static_cast<size_t>(c)] < 0) continue;
      out(r, c) = rho.data()(map[static_cast<size_t>(r)], map[static_cast<size_t>(c)]);
    }
  }
  const double kept = out.trace().real();
  if (deficit) *deficit = std::max(0.0, 1.0 - kept);
  if (!(kept > 0.0)) fail(ErrorCode::CutoffTooSmall, "no probability mass below the requested cutoff");
  return DensityMatrix(n, cutoff, std::move(out), false);
}

bool has_closed_form(const StateModel& s) { return !std::holds_alternative<FockDensity>(s); }

}  // namespace

int mode_count(const StateModel& state) {
  return std::visit(overloaded{
                        [](const CoherentSuperposition& s) { return s.n_modes; },
                        [](const Tmsv&) { return 2; },
                        [](const PhotonSubtractedTmsv&) { return 2; },
                        [](const NoisyFourModeCat&) { return 4; },
                        [](const FockDensity& s) { return s.matrix.n_modes(); },
                    },
                    state);
}

void validate_state(const StateModel& state) {
  std::visit(overloaded{
                 [](const CoherentSuperposition& s) {
                   if (s.n_modes < 1) fail(ErrorCode::InvalidArgument, "coherent superposition needs n_modes >= 1");
                   if (s.terms.empty()) fail(ErrorCode::InvalidArgument, "coherent superposition has no terms");
                   for (const auto& t : s.terms) {
                     if (static_cast<int>(t.amplitudes.size()) != s.n_modes) {
                       fail(ErrorCode::InvalidArgument, "term has " + std::to_string(t.amplitudes.size()) +
                                                            " amplitudes, expected " + std::to_string(s.n_modes));
                     }
                   }
                   if (s.n_modes > 63) fail(ErrorCode::InvalidArgument, "at most 63 modes are supported");
                   if (!(coherent_norm2(s) > kNormFloor)) {
                     fail(ErrorCode::DegenerateNorm, "coherent superposition has vanishing norm");
                   }
                 },
                 [](const Tmsv&) {},
                 [](const PhotonSubtractedTmsv& s) {
                   if (!(s.kappa >= 0.0 && s.kappa <= 1.0)) fail(ErrorCode::InvalidArgument, "kappa must lie in [0, 1]");
                   if (s.xi == Complex{}) fail(ErrorCode::DegenerateNorm, "photon subtraction from the vacuum (xi = 0)");
                 },
                 [](const NoisyFourModeCat& s) {
                   if (!(s.sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be >= 0");
                 },
                 [](const FockDensity&) {},
             },
             state);
}

CoherentSuperposition bell_like_state(Complex epsilon, Complex gamma) {
  return {2,
          {{Complex{1.0 - std::abs(epsilon) / 2.0, 0.0}, {gamma, -gamma}},
           {epsilon / 2.0, {-gamma, gamma}}}};
}

CoherentSuperposition four_mode_cat(Complex gamma) {
  return {4, {{Complex{1.0, 0.0}, {gamma, gamma, gamma, gamma}}, {Complex{1.0, 0.0}, {-gamma, -gamma, -gamma, -gamma}}}};
}

double coherent_superposition_correlation(const CoherentSuperposition& state,
                                          std::span<const Complex> displacements) {
  if (static_cast<int>(displacements.size()) != state.n_modes) {
    fail(ErrorCode::ModelMismatch, "expected " + std::to_string(state.n_modes) + " displacements, got " +
                                       std::to_string(displacements.size()));
  }
  Complex norm{0.0, 0.0};
  Complex value{0.0, 0.0};
  for (const auto& ts : state.terms) {
    for (const auto& tt : state.terms) {
      Complex lo{0.0, 0.0};
      Complex prod{1.0, 0.0};
      for (int j = 0; j < state.n_modes; ++j) {
        const Complex d = ts.amplitudes[static_cast<size_t>(j)];
        const Complex g = tt.amplitudes[static_cast<size_t>(j)];
        const Complex a = displacements[static_cast<size_t>(j)];
        lo += log_overlap(d, g);
        prod *= std::conj(d - a) * (g - a);
      }
      const Complex w = std::conj(ts.coeff) * tt.coeff * std::exp(lo);
      norm += w;
      value += w * prod;
    }
  }
  if (!(norm.real() > kNormFloor)) fail(ErrorCode::DegenerateNorm, "coherent superposition has vanishing norm");
  return value.real() / norm.real();
}

double coherent_superposition_expectation_L(const CoherentSuperposition& state, const WitnessSpec& witness) {
  if (state.n_modes != witness.n_modes()) {
    fail(ErrorCode::ModelMismatch, "state has " + std::to_string(state.n_modes) + " modes but the witness has " +
                                       std::to_string(witness.n_modes()));
  }
  const auto& blocks = witness.partition().blocks();
  const auto& q = witness.q_weights();
  Complex norm{0.0, 0.0};
  Complex value{0.0, 0.0};
  for (const auto& ts : state.terms) {
    for (const auto& tt : state.terms) {
      Complex lo{0.0, 0.0};
      for (int j = 0; j < state.n_modes; ++j) {
        lo += log_overlap(ts.amplitudes[static_cast<size_t>(j)], tt.amplitudes[static_cast<size_t>(j)]);
      }
      const Complex w = std::conj(ts.coeff) * tt.coeff * std::exp(lo);
      norm += w;
      // <delta| prod_l sum_{j in l} q_j n_j(a) |gamma> / <delta|gamma>
      //   = prod_l sum_{j in l} q_j (delta_j - a_j)^* (gamma_j - a_j)
      Complex inner{0.0, 0.0};
      for (int k = 0; k < witness.m(); ++k) {
        Complex prod{1.0, 0.0};
        for (const auto& block : blocks) {
          Complex s{0.0, 0.0};
          for (int j : block) {
            const Complex a = witness.displacement(k, j);
            s += q[static_cast<size_t>(j)] * std::conj(ts.amplitudes[static_cast<size_t>(j)] - a) *
                 (tt.amplitudes[static_cast<size_t>(j)] - a);
          }
          prod *= s;
        }
        inner += witness.lambdas()[static_cast<size_t>(k)] * prod;
      }
      value += w * inner;
    }
  }
  if (!(norm.real() > kNormFloor)) fail(ErrorCode::DegenerateNorm, "coherent superposition has vanishing norm");
  return witness.scale() * value.real() / norm.real();
}

double tmsv_correlation(Complex xi, Complex alpha, Complex beta) {
  const double r = std::abs(xi);
  const double s = std::pow(std::sinh(r), 2);
  const Complex anomalous = 0.5 * std::sinh(2.0 * r) * std::polar(1.0, phase_of(xi));
  return (s + std::norm(alpha)) * (s + std::norm(beta)) + std::norm(anomalous - alpha * beta) -
         std::norm(alpha) * std::norm(beta);
}

double photon_subtracted_correlation(Complex xi, double kappa, Complex alpha, Complex beta) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) fail(ErrorCode::InvalidArgument, "kappa must lie in [0, 1]");
  const double r = std::abs(xi);
  const double s = std::pow(std::sinh(r), 2);
  const double a2 = std::norm(alpha);
  const double b2 = std::norm(beta);
  const double rotated = (std::polar(1.0, -phase_of(xi)) * alpha * beta).real();
  return 6.0 * s * s + 2.0 * s * (a2 + b2 + 2.0) + a2 * b2 + kappa * a2 + (1.0 - kappa) * b2 -
         2.0 * std::sinh(2.0 * r) * rotated +
         2.0 * std::sqrt(kappa * (1.0 - kappa)) * (alpha * std::conj(beta)).real() * (1.0 + 2.0 * s);
}

double mixture_expectation(Complex gamma, double sigma, const std::function<double(Complex)>& inner,
                           const QuadratureRule& rule) {
  if (!(sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be >= 0");
  if (sigma == 0.0) return inner(gamma);
  auto integrate = [&](int order) {
    double total = 0.0;
    for_each_noise_node(gamma, sigma, order, [&](Complex g, double w) { total += w * inner(g); });
    return total;
  };
  int order = rule.order();
  double previous = integrate(order);
  while (2 * order <= kMaxQuadratureOrder) {
    order *= 2;
    const double current = integrate(order);
    if (std::abs(current - previous) <= kQuadratureTol) return current;
    previous = current;
  }
  fail(ErrorCode::QuadratureNotConverged, "Gauss-Hermite integral not stable up to order " +
                                              std::to_string(kMaxQuadratureOrder));
}

double fock_expectation_L(const DensityMatrix& rho, const WitnessSpec& witness) {
  if (rho.n_modes() != witness.n_modes()) {
    fail(ErrorCode::ModelMismatch, "state has " + std::to_string(rho.n_modes()) + " modes but the witness has " +
                                       std::to_string(witness.n_modes()));
  }
  const FockCutoff cut = rho.cutoff();
  const ModeOperator id = identity_matrix(cut);
  double total = 0.0;
  for (int k = 0; k < witness.m(); ++k) {
    std::vector<ModeOperator> displaced;
    for (int j = 0; j < witness.n_modes(); ++j) displaced.push_back(displaced_number_matrix(witness.displacement(k, j), cut));
    double term = 0.0;
    for_each_selection(witness, [&](unsigned long mask, double qprod) {
      if (qprod == 0.0) return;
      std::vector<ModeOperator> ops;
      for (int j = 0; j < witness.n_modes(); ++j) ops.push_back((mask >> j) & 1ul ? displaced[static_cast<size_t>(j)] : id);
      term += qprod * tensor_expectation(rho, ops);
    });
    total += witness.lambdas()[static_cast<size_t>(k)] * term;
  }
  return witness.scale() * total;
}

double expectation_L(const StateModel& state, const WitnessSpec& witness) {
  require_modes(state, witness);
  return std::visit(
      overloaded{
          [&](const CoherentSuperposition& s) { return coherent_superposition_expectation_L(s, witness); },
          [&](const Tmsv& s) {
            const double sh2 = std::pow(std::sinh(std::abs(s.xi)), 2);
            return two_mode_expectation(
                witness, [&](Complex a, Complex b) { return tmsv_correlation(s.xi, a, b); },
                [&](Complex a) { return sh2 + std::norm(a); }, [&](Complex b) { return sh2 + std::norm(b); });
          },
          [&](const PhotonSubtractedTmsv& s) {
            validate_state(s);
            const double sh2 = std::pow(std::sinh(std::abs(s.xi)), 2);
            return two_mode_expectation(
                witness, [&](Complex a, Complex b) { return photon_subtracted_correlation(s.xi, s.kappa, a, b); },
                [&](Complex a) { return 2.0 * sh2 + (1.0 - s.kappa) + std::norm(a); },
                [&](Complex b) { return 2.0 * sh2 + s.kappa + std::norm(b); });
          },
          [&](const NoisyFourModeCat& s) {
            if (!(s.sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be >= 0");
            auto inner = [&](Complex g) { return coherent_superposition_expectation_L(four_mode_cat(g), witness); };
            return mixture_expectation(s.gamma, s.sigma, inner, QuadratureRule::gauss_hermite(kDefaultQuadratureOrder));
          },
          [&](const FockDensity& s) { return fock_expectation_L(s.matrix, witness); },
      },
      state);
}

double truncation_deficit(const StateModel& state, FockCutoff cutoff) {
  return std::visit(overloaded{
                        [&](const CoherentSuperposition& s) {
                          // per-term deficits bound the truncation without building the vector
                          validate_state(s);
                          return coherent_image(s, cutoff).deficit;
                        },
                        [&](const Tmsv& s) { return tmsv_image(s, cutoff).deficit; },
                        [&](const PhotonSubtractedTmsv& s) { return subtracted_image(s, cutoff).deficit; },
                        [&](const NoisyFourModeCat& s) {
                          if (s.sigma == 0.0) return coherent_image(four_mode_cat(s.gamma), cutoff).deficit;
                          double deficit = 0.0;
                          for_each_noise_node(s.gamma, s.sigma, kDefaultQuadratureOrder, [&](Complex g, double w) {
                            deficit += w * coherent_image(four_mode_cat(g), cutoff).deficit;
                          });
                          return deficit;
                        },
                        [&](const FockDensity& s) {
                          if (cutoff.n_max() >= s.matrix.cutoff().n_max()) return 0.0;
                          double deficit = 0.0;
                          recut(s.matrix, cutoff, &deficit);
                          return deficit;
                        },
                    },
                    state);
}

DensityMatrix state_to_fock(const StateModel& state, FockCutoff cutoff) {
  validate_state(state);
  const int n = mode_count(state);
  if (!std::holds_alternative<FockDensity>(state) && fock_dimension(n, cutoff) > kMaxDenseDim) {
    fail(ErrorCode::CutoffTooSmall, "Fock dimension " + std::to_string(fock_dimension(n, cutoff)) +
                                        " exceeds the dense limit " + std::to_string(kMaxDenseDim));
  }
  auto check = [&](double deficit) {
    if (deficit > kStateDeficitTol) {
      fail(ErrorCode::CutoffTooSmall, "truncated norm deficit " + std::to_string(deficit) + " at n_max=" +
                                          std::to_string(cutoff.n_max()));
    }
  };
  auto from_image = [&](const PureImage& img) {
    check(img.deficit);
    return DensityMatrix::from_pure(n, cutoff, img.psi);
  };
  return std::visit(
      overloaded{
          [&](const CoherentSuperposition& s) { return from_image(coherent_image(s, cutoff)); },
          [&](const Tmsv& s) { return from_image(tmsv_image(s, cutoff)); },
          [&](const PhotonSubtractedTmsv& s) { return from_image(subtracted_image(s, cutoff)); },
          [&](const NoisyFourModeCat& s) {
            if (s.sigma == 0.0) return from_image(coherent_image(four_mode_cat(s.gamma), cutoff));
            std::vector<CVector> columns;
            std::vector<double> weights;
            double deficit = 0.0;
            for_each_noise_node(s.gamma, s.sigma, kDefaultQuadratureOrder, [&](Complex g, double w) {
              if (w < 1e-16) return;
              PureImage img = coherent_image(four_mode_cat(g), cutoff);
              deficit += w * img.deficit;
              columns.push_back(std::move(img.psi) * std::sqrt(w));
              weights.push_back(w);
            });
            check(deficit);
            CMatrix psi(fock_dimension(n, cutoff), static_cast<Eigen::Index>(columns.size()));
            for (size_t c = 0; c < columns.size(); ++c) psi.col(static_cast<Eigen::Index>(c)) = columns[c];
            CMatrix rho = psi * psi.adjoint();
            return DensityMatrix(n, cutoff, std::move(rho), false);
          },
          [&](const FockDensity& s) {
            if (s.matrix.cutoff() == cutoff) return s.matrix;
            double deficit = 0.0;
            DensityMatrix out = recut(s.matrix, cutoff, &deficit);
            check(deficit);
            return out;
          },
      },
      state);
}

FockCutoff auto_cutoff(const StateModel& state, const WitnessSpec* witness, int max_n_max) {
  if (const auto* f = std::get_if<FockDensity>(&state)) return f->matrix.cutoff();
  const int n = mode_count(state);
  const std::optional<double> exact =
      (witness && has_closed_form(state)) ? std::optional<double>(expectation_L(state, *witness)) : std::nullopt;
  for (int n_max = 2; n_max <= max_n_max; ++n_max) {
    const FockCutoff cut(n_max);
    if (fock_dimension(n, cut) > kMaxDenseDim) break;
    if (truncation_deficit(state, cut) >= kAutoDeficitTol) continue;
    if (!exact) return cut;
    const double approx = fock_expectation_L(state_to_fock(state, cut), *witness);
    if (std::abs(approx - *exact) < kAutoExpectationTol * std::max(1.0, std::abs(*exact))) return cut;
  }
  fail(ErrorCode::CutoffTooSmall, "no cutoff up to n_max=" + std::to_string(max_n_max) +
                                      " within the dense limit satisfies the convergence policy");
}

}  // namespace witness_forge
