#include "witness_forge/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "witness_forge/error.hpp"

namespace witness_forge {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kPsdTol = -1e-8;
constexpr double kImagTol = 1e-8;
constexpr double kClipTol = -1e-10;
constexpr double kMassDeficitTol = 1e-4;

using StridedMap = Eigen::Map<CMatrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;

long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_ops(const DensityMatrix& rho, std::span<const ModeOperator> ops) {
  if (static_cast<int>(ops.size()) != rho.n_modes()) {
    fail(ErrorCode::ModelMismatch, "expected " + std::to_string(rho.n_modes()) +
                                       " mode operators, got " + std::to_string(ops.size()));
  }
  for (const auto& op : ops) {
    if (!(op.cutoff == rho.cutoff())) {
      fail(ErrorCode::ModelMismatch, "mode operator cutoff differs from the density matrix cutoff");
    }
  }
}

bool is_identity(const CMatrix& m) { return m.isIdentity(0.0); }

}  // namespace

FockCutoff::FockCutoff(int n_max) : n_max_(n_max) {
  if (n_max < 1) fail(ErrorCode::InvalidArgument, "n_max must be >= 1, got " + std::to_string(n_max));
}

long fock_dimension(int n_modes, FockCutoff cutoff) { return ipow(cutoff.dim(), n_modes); }

DensityMatrix::DensityMatrix(int n_modes, FockCutoff cutoff, CMatrix data, bool check_psd)
    : n_modes_(n_modes), cutoff_(cutoff), data_(std::move(data)) {
  if (n_modes < 1) fail(ErrorCode::InvalidArgument, "density matrix needs at least one mode");
  const long dim = fock_dimension(n_modes, cutoff);
  if (data_.rows() != dim || data_.cols() != dim) {
    fail(ErrorCode::InvalidArgument, "density matrix must be " + std::to_string(dim) + "x" +
                                         std::to_string(dim) + " for " + std::to_string(n_modes) +
                                         " modes at n_max=" + std::to_string(cutoff.n_max()));
  }
  const double herm = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    fail(ErrorCode::InvalidArgument, "density matrix is not Hermitian (defect " + std::to_string(herm) + ")");
  }
  data_ = 0.5 * (data_ + data_.adjoint()).eval();
  const double tr = data_.trace().real();
  if (!(tr > 0.0)) fail(ErrorCode::InvalidArgument, "density matrix has non-positive trace");
  data_ /= tr;
  if (check_psd) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(data_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kPsdTol) {
      fail(ErrorCode::InvalidArgument, "density matrix is not positive semidefinite (min eigenvalue " +
                                           std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
  }
}

DensityMatrix::DensityMatrix(Trusted, int n_modes, FockCutoff cutoff, CMatrix data)
    : n_modes_(n_modes), cutoff_(cutoff), data_(std::move(data)) {}

DensityMatrix DensityMatrix::from_pure(int n_modes, FockCutoff cutoff, const CVector& psi) {
  if (psi.size() != fock_dimension(n_modes, cutoff)) {
    fail(ErrorCode::InvalidArgument, "state vector length does not match the Fock dimension");
  }
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > 0.0)) fail(ErrorCode::DegenerateNorm, "zero state vector");
  CMatrix rho = psi * psi.adjoint() / norm2;
  return DensityMatrix(Trusted{}, n_modes, cutoff, std::move(rho));
}

ModeOperator identity_matrix(FockCutoff cutoff) {
  return {cutoff, CMatrix::Identity(cutoff.dim(), cutoff.dim())};
}

ModeOperator annihilation_matrix(FockCutoff cutoff) {
  CMatrix a = CMatrix::Zero(cutoff.dim(), cutoff.dim());
  for (int n = 1; n <= cutoff.n_max(); ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {cutoff, std::move(a)};
}

ModeOperator displaced_number_matrix(Complex alpha, FockCutoff cutoff) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    fail(ErrorCode::InvalidArgument, "displacement must be finite");
  }
  const int d = cutoff.dim();
  CMatrix m = CMatrix::Zero(d, d);
  const double shift = std::norm(alpha);
  for (int n = 0; n < d; ++n) m(n, n) = static_cast<double>(n) + shift;
  for (int n = 1; n < d; ++n) {
    const double s = std::sqrt(static_cast<double>(n));
    m(n - 1, n) = -std::conj(alpha) * s;  // -alpha^* a
    m(n, n - 1) = -alpha * s;             // -alpha a^dagger
  }
  return {cutoff, std::move(m)};
}

CMatrix displacement_matrix(Complex alpha, FockCutoff cutoff) {
  const int d = cutoff.dim();
  if (alpha == Complex{0.0, 0.0}) return CMatrix::Identity(d, d);
  const double x = std::norm(alpha);
  const double log_abs = 0.5 * std::log(x);
  const double phase = std::arg(alpha);
  CMatrix D(d, d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      const int lo = std::min(m, n);
      const int diff = std::abs(m - n);
      const double log_pref = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + diff + 1.0)) +
                              diff * log_abs - 0.5 * x;
      const double lag = std::assoc_laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(diff), x);
      // m >= n: alpha^(m-n); m < n: (-alpha^*)^(n-m)
      const double ph = (m >= n) ? diff * phase : diff * (kPi - phase);
      D(m, n) = std::polar(std::exp(log_pref) * lag, ph);
    }
  }
  return D;
}

void apply_on_mode(CMatrix& m, const CMatrix& op, int mode, int n_modes, int mode_dim) {
  const long rows = m.rows();
  const long cols = m.cols();
  const long stride = ipow(mode_dim, n_modes - 1 - mode);
  const long outer = ipow(mode_dim, mode);
  CMatrix tmp(mode_dim, cols);
  for (long o = 0; o < outer; ++o) {
    for (long t = 0; t < stride; ++t) {
      Complex* base = m.data() + o * mode_dim * stride + t;
      StridedMap view(base, mode_dim, cols, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(rows, stride));
      tmp.noalias() = op * view;
      view = tmp;
    }
  }
}

Complex tensor_expectation_complex(const DensityMatrix& rho, std::span<const ModeOperator> ops) {
  check_ops(rho, ops);
  CMatrix work = rho.data();
  for (int j = 0; j < rho.n_modes(); ++j) {
    if (is_identity(ops[static_cast<size_t>(j)].data)) continue;
    apply_on_mode(work, ops[static_cast<size_t>(j)].data, j, rho.n_modes(), rho.cutoff().dim());
  }
  return work.trace();
}

double tensor_expectation(const DensityMatrix& rho, std::span<const ModeOperator> ops) {
  const Complex v = tensor_expectation_complex(rho, ops);
  if (std::abs(v.imag()) > kImagTol) {
    fail(ErrorCode::ImaginaryResidual, "expectation has imaginary part " + std::to_string(v.imag()));
  }
  return v.real();
}

RMatrix covariance_matrix(const DensityMatrix& rho) {
  const int n = rho.n_modes();
  const FockCutoff cut = rho.cutoff();
  const ModeOperator id = identity_matrix(cut);
  const ModeOperator a = annihilation_matrix(cut);
  const ModeOperator a2{cut, a.data * a.data};
  const ModeOperator ad{cut, a.data.adjoint()};
  const ModeOperator num{cut, ad.data * a.data};

  auto moment = [&](std::initializer_list<std::pair<int, const ModeOperator*>> factors) {
    std::vector<ModeOperator> ops(static_cast<size_t>(n), id);
    for (const auto& [mode, op] : factors) ops[static_cast<size_t>(mode)] = *op;
    return tensor_expectation_complex(rho, ops);
  };

  std::vector<Complex> first(static_cast<size_t>(n));
  // pair[j][k] = <a_j a_k>, mixed[j][k] = <a_j^dag a_k>
  std::vector<std::vector<Complex>> pair(static_cast<size_t>(n), std::vector<Complex>(static_cast<size_t>(n)));
  auto mixed = pair;
  for (int j = 0; j < n; ++j) {
    first[static_cast<size_t>(j)] = moment({{j, &a}});
    pair[static_cast<size_t>(j)][static_cast<size_t>(j)] = moment({{j, &a2}});
    mixed[static_cast<size_t>(j)][static_cast<size_t>(j)] = moment({{j, &num}});
    for (int k = j + 1; k < n; ++k) {
      const Complex ajak = moment({{j, &a}, {k, &a}});
      pair[static_cast<size_t>(j)][static_cast<size_t>(k)] = ajak;
      pair[static_cast<size_t>(k)][static_cast<size_t>(j)] = ajak;
      const Complex adjak = moment({{j, &ad}, {k, &a}});
      mixed[static_cast<size_t>(j)][static_cast<size_t>(k)] = adjak;
      mixed[static_cast<size_t>(k)][static_cast<size_t>(j)] = std::conj(adjak);
    }
  }

  // R_i = u_i a_m + conj(u_i) a_m^dag with u = 1/sqrt2 (x) or -i/sqrt2 (p).
  const double r2 = 1.0 / std::sqrt(2.0);
  auto coeff = [&](int i) { return (i % 2 == 0) ? Complex{r2, 0.0} : Complex{0.0, -r2}; };
  RMatrix V(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int l = 0; l < 2 * n; ++l) {
      const int mi = i / 2;
      const int ml = l / 2;
      const Complex ui = coeff(i);
      const Complex ul = coeff(l);
      // symmetrized <R_i R_l>
      double sym = 2.0 * (ui * ul * pair[static_cast<size_t>(mi)][static_cast<size_t>(ml)]).real() +
                   2.0 * (ui * std::conj(ul) * mixed[static_cast<size_t>(ml)][static_cast<size_t>(mi)]).real();
      if (mi == ml) sym += (ui * std::conj(ul)).real();
      const double mean_i = 2.0 * (ui * first[static_cast<size_t>(mi)]).real();
      const double mean_l = 2.0 * (ul * first[static_cast<size_t>(ml)]).real();
      V(i, l) = sym - mean_i * mean_l;
    }
  }
  return 0.5 * (V + V.transpose());
}

JointDistribution joint_displaced_number_distribution(const DensityMatrix& rho,
                                                      std::span<const Complex> displacements) {
  const int n = rho.n_modes();
  if (static_cast<int>(displacements.size()) != n) {
    fail(ErrorCode::ModelMismatch, "expected " + std::to_string(n) + " displacements, got " +
                                       std::to_string(displacements.size()));
  }
  const int d = rho.cutoff().dim();
  std::vector<CMatrix> D;
  D.reserve(static_cast<size_t>(n));
  for (const Complex alpha : displacements) D.push_back(displacement_matrix(alpha, rho.cutoff()));

  // p(n) = [U^dag rho U]_{nn}, U = D(alpha_1) x ... x D(alpha_N)
  CMatrix left = rho.data();
  for (int j = 0; j < n; ++j) {
    if (displacements[static_cast<size_t>(j)] == Complex{}) continue;
    apply_on_mode(left, D[static_cast<size_t>(j)].adjoint(), j, n, d);
  }
  CMatrix right = left.transpose();
  for (int j = 0; j < n; ++j) {
    if (displacements[static_cast<size_t>(j)] == Complex{}) continue;
    apply_on_mode(right, D[static_cast<size_t>(j)].transpose(), j, n, d);
  }

  JointDistribution out{n, rho.cutoff(), std::vector<double>(static_cast<size_t>(right.rows())), 0.0};
  double mass = 0.0;
  for (long i = 0; i < right.rows(); ++i) {
    double p = right(i, i).real();
    if (p < 0.0) {
      if (p < kClipTol) {
        fail(ErrorCode::InvalidArgument, "negative probability " + std::to_string(p) +
                                             " in displaced number distribution");
      }
      p = 0.0;
    }
    out.probabilities[static_cast<size_t>(i)] = p;
    mass += p;
  }
  out.mass_deficit = 1.0 - mass;
  if (out.mass_deficit > kMassDeficitTol) {
    fail(ErrorCode::CutoffTooSmall, "displaced distribution misses probability mass " +
                                        std::to_string(out.mass_deficit) + " at n_max=" +
                                        std::to_string(rho.cutoff().n_max()));
  }
  for (double& p : out.probabilities) p /= mass;
  return out;
}

DensityMatrix attenuate(const DensityMatrix& rho, std::span<const double> etas) {
  const int n = rho.n_modes();
  if (static_cast<int>(etas.size()) != n) {
    fail(ErrorCode::ModelMismatch, "expected " + std::to_string(n) + " efficiencies, got " +
                                       std::to_string(etas.size()));
  }
  const int d = rho.cutoff().dim();
  CMatrix current = rho.data();
  for (int j = 0; j < n; ++j) {
    const double eta = etas[static_cast<size_t>(j)];
    if (!(eta > 0.0)) fail(ErrorCode::ZeroEfficiency, "efficiency of mode " + std::to_string(j) + " is not positive");
    if (eta > 1.0) fail(ErrorCode::InvalidArgument, "efficiency of mode " + std::to_string(j) + " exceeds 1");
    if (eta == 1.0) continue;
    CMatrix next = CMatrix::Zero(current.rows(), current.cols());
    for (int k = 0; k < d; ++k) {
      // E_k = sum_n sqrt(C(n,k)) eta^((n-k)/2) (1-eta)^(k/2) |n-k><n|
      CMatrix E = CMatrix::Zero(d, d);
      for (int m = k; m < d; ++m) {
        const double log_binom = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
        E(m - k, m) = std::exp(0.5 * log_binom + 0.5 * (m - k) * std::log(eta) +
                               (k == 0 ? 0.0 : 0.5 * k * std::log1p(-eta)));
      }
      CMatrix t = current;
      apply_on_mode(t, E, j, n, d);
      CMatrix tt = t.adjoint();
      apply_on_mode(tt, E, j, n, d);
      next += tt.adjoint();
    }
    current = std::move(next);
  }
  return DensityMatrix(n, rho.cutoff(), std::move(current), false);
}

}  // namespace witness_forge
