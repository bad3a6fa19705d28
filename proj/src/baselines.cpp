#include "witness_forge/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "witness_forge/error.hpp"

namespace witness_forge {

namespace {
constexpr double kSymmetryTol = 1e-9;
constexpr double kUncertaintyTol = -1e-6;
constexpr double kSimonZero = 1e-10;
constexpr double kScaleLo = 1e-3;
constexpr double kScaleHi = 1e3;
constexpr int kGridPoints = 601;
constexpr double kCovarianceTol = 1e-12;
constexpr int kMaxCovarianceCutoff = 60;
}  // namespace

std::string_view to_string(Criterion criterion) {
  return criterion == Criterion::Simon ? "simon" : "duan";
}

RMatrix state_covariance(const StateModel& state, std::optional<FockCutoff> cutoff) {
  if (mode_count(state) != 2) {
    fail(ErrorCode::ModelMismatch, "covariance criteria need a two-mode state, got " +
                                       std::to_string(mode_count(state)) + " modes");
  }
  if (cutoff) return covariance_matrix(state_to_fock(state, *cutoff));
  int n_max = auto_cutoff(state).n_max();
  RMatrix previous = covariance_matrix(state_to_fock(state, FockCutoff(n_max)));
  for (n_max += 2; n_max <= kMaxCovarianceCutoff; n_max += 2) {
    RMatrix current = covariance_matrix(state_to_fock(state, FockCutoff(n_max)));
    if ((current - previous).cwiseAbs().maxCoeff() < kCovarianceTol) return current;
    previous = std::move(current);
  }
  fail(ErrorCode::CutoffTooSmall, "covariance not converged up to n_max=" + std::to_string(kMaxCovarianceCutoff));
}

void check_covariance(const RMatrix& cov) {
  if (cov.rows() != 4 || cov.cols() != 4) fail(ErrorCode::InvalidCovariance, "covariance must be 4x4");
  if (!cov.allFinite()) fail(ErrorCode::InvalidCovariance, "covariance has non-finite entries");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::InvalidCovariance, "covariance is not symmetric");
  }
  Eigen::Matrix4cd test = cov.cast<Complex>();
  for (int mode = 0; mode < 2; ++mode) {
    test(2 * mode, 2 * mode + 1) += Complex{0.0, 0.5};
    test(2 * mode + 1, 2 * mode) -= Complex{0.0, 0.5};
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(test, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kUncertaintyTol) {
    fail(ErrorCode::InvalidCovariance, "covariance violates the uncertainty relation");
  }
}

BaselineResult simon_criterion(const RMatrix& cov) {
  check_covariance(cov);
  const Eigen::Matrix2d A = cov.block<2, 2>(0, 0);
  const Eigen::Matrix2d B = cov.block<2, 2>(2, 2);
  const Eigen::Matrix2d C = cov.block<2, 2>(0, 2);
  Eigen::Matrix2d J;
  J << 0.0, 1.0, -1.0, 0.0;
  double value = A.determinant() * B.determinant() + std::pow(0.25 - std::abs(C.determinant()), 2) -
                 (A * J * C * J * B * J * C.transpose() * J).trace() - 0.25 * (A.determinant() + B.determinant());
  if (std::abs(value) < kSimonZero) value = 0.0;
  return {Criterion::Simon, value, value < 0.0};
}

BaselineResult duan_criterion(const RMatrix& cov) {
  check_covariance(cov);
  const double t1 = cov(0, 0) + cov(1, 1) - 1.0;
  const double t2 = cov(2, 2) + cov(3, 3) - 1.0;
  const double s = std::hypot(cov(0, 2) - cov(1, 3), cov(0, 3) + cov(1, 2));
  auto value_at = [&](double log_a) {
    const double a2 = std::exp(2.0 * log_a);
    return a2 * t1 + t2 / a2 - 2.0 * s;
  };
  const double lo = std::log(kScaleLo), hi = std::log(kScaleHi);
  const double step = (hi - lo) / (kGridPoints - 1);
  int best = 0;
  double best_value = value_at(lo);
  for (int i = 1; i < kGridPoints; ++i) {
    const double v = value_at(lo + i * step);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  // golden-section refinement on the bracketing grid cells
  double a = lo + std::max(0, best - 1) * step;
  double b = lo + std::min(kGridPoints - 1, best + 1) * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = value_at(x1), f2 = value_at(x2);
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = value_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = value_at(x2);
    }
  }
  best_value = std::min({best_value, f1, f2});
  return {Criterion::Duan, best_value, best_value < 0.0};
}

}  // namespace witness_forge
