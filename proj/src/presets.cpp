#include "witness_forge/presets.hpp"

#include <cmath>

namespace witness_forge::presets {

namespace {

WitnessSpec bipartite_rows(const std::vector<Complex>& alpha, const std::vector<Complex>& beta) {
  CMatrix d(static_cast<Eigen::Index>(alpha.size()), 2);
  for (size_t k = 0; k < alpha.size(); ++k) {
    d(static_cast<Eigen::Index>(k), 0) = alpha[k];
    d(static_cast<Eigen::Index>(k), 1) = beta[k];
  }
  return WitnessSpec::uniform(PartitionSpec::bipartite(), std::move(d));
}

// columns of `rows` are displacement rows k; rows are modes
WitnessSpec real_witness(PartitionSpec partition, const std::vector<std::vector<double>>& modes) {
  const auto m = static_cast<Eigen::Index>(modes.front().size());
  CMatrix d(m, static_cast<Eigen::Index>(modes.size()));
  for (size_t j = 0; j < modes.size(); ++j) {
    for (Eigen::Index k = 0; k < m; ++k) d(k, static_cast<Eigen::Index>(j)) = modes[j][static_cast<size_t>(k)];
  }
  return WitnessSpec::uniform(std::move(partition), std::move(d));
}

}  // namespace

std::vector<Complex> bell_q_points(double gamma) {
  const double delta = std::cbrt(std::sqrt(2.0) - 1.0);
  const Complex q2 = Complex{delta + 1.0 / delta, std::sqrt(delta * delta + 1.0 / (delta * delta))} * gamma / 2.0;
  return {Complex{-std::sqrt(2.0) * gamma, 0.0}, q2, std::conj(q2)};
}

WitnessSpec bell_witness(double gamma) {
  const auto q = bell_q_points(gamma);
  return bipartite_rows({q[0], 1.2 * q[1], 0.8 * q[2]}, {q[0], 0.8 * q[1], 1.2 * q[2]});
}

WitnessSpec bell_symmetric_witness(double gamma) {
  const auto q = bell_q_points(gamma);
  return bipartite_rows(q, q);
}

CoherentSuperposition bell_state(Complex epsilon, double gamma) { return bell_like_state(epsilon, gamma); }

WitnessSpec tmsv_circle_witness(double r, Complex xi) {
  const Complex tilt = std::polar(1.0, phase_of(xi) / 2.0);
  std::vector<Complex> alpha, beta;
  for (int k = 0; k < 3; ++k) {
    const Complex a = std::polar(r, (0.5 - 2.0 * k) * kPi / 3.0);
    alpha.push_back(a * tilt);
    beta.push_back(std::conj(a) * tilt);
  }
  return bipartite_rows(alpha, beta);
}

double tmsv_r_crit(Complex xi) {
  const double s = std::abs(xi);
  return 0.5 * std::sqrt(std::cosh(2.0 * s) * (std::exp(2.0 * s) - 1.0));
}

double tmsv_r_max(Complex xi) { return std::sqrt(2.0) * tmsv_r_crit(xi); }

WitnessSpec subtracted_global_witness() {
  const double r = 2.2;
  const Complex theta = std::polar(1.0, kPi / 5.0);
  const std::vector<Complex> alpha = {r * theta, Complex{0.0, -r}, -r * std::conj(theta)};
  std::vector<Complex> beta;
  for (Complex a : alpha) beta.push_back(std::conj(a));
  return bipartite_rows(alpha, beta);
}

WitnessSpec subtracted_local_witness() {
  const double ra = 1.6, rb = 2.2;
  const Complex a1 = std::polar(ra, kPi / 3.0);
  const std::vector<Complex> alpha = {a1, std::conj(a1), Complex{-ra, 0.0}};
  std::vector<Complex> beta;
  for (Complex a : alpha) beta.push_back(rb / ra * std::conj(a));
  return bipartite_rows(alpha, beta);
}

WitnessSpec swap_modes(const WitnessSpec& w) {
  CMatrix d(w.m(), 2);
  d.col(0) = w.displacements().col(1);
  d.col(1) = w.displacements().col(0);
  const std::vector<double> q = {w.q_weights()[1], w.q_weights()[0]};
  return WitnessSpec(PartitionSpec::bipartite(), w.lambdas(), std::move(d), q, w.scale());
}

std::vector<NamedWitness> cat_witnesses() {
  return {
      {"four_partition",
       real_witness(PartitionSpec::full(4), {{-1.3, -0.3, 0.7, 1.7, 2.7},
                                             {-2.3, -1.3, -0.3, 0.7, 1.7},
                                             {0.3, 1.3, -2.7, -1.7, -0.7},
                                             {1.3, 2.3, -1.7, -0.7, 0.3}})},
      {"tripartition",
       real_witness(PartitionSpec(4, {{0}, {1, 2}, {3}}),
                    {{-0.7, 0.3, 1.3, 2.3}, {-2, -1, 0, 1}, {-2, -1, 0, 1}, {0.7, -2.3, -1.3, -0.3}})},
      {"bipartition_01_23",
       real_witness(PartitionSpec(4, {{0, 1}, {2, 3}}),
                    {{-0.7, 0.3, 1.3}, {-0.7, 0.3, 1.3}, {0.7, -1.3, -0.3}, {0.7, -1.3, -0.3}})},
      {"bipartition_0_123",
       real_witness(PartitionSpec(4, {{0}, {1, 2, 3}}),
                    {{-0.7, 0.3, 1.3}, {0.7, -1.3, -0.3}, {0.7, -1.3, -0.3}, {0.7, -1.3, -0.3}})},
  };
}

}  // namespace witness_forge::presets
