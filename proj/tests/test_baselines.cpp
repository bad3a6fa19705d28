#include <cmath>

#include "doctest.h"
#include "witness_forge/baselines.hpp"
#include "witness_forge/error.hpp"
#include "witness_forge/presets.hpp"

using namespace witness_forge;

namespace {

// Local phase rotation of mode j: x -> x cos t + p sin t, p -> -x sin t + p cos t.
RMatrix rotate(const RMatrix& cov, double t0, double t1) {
  RMatrix s = RMatrix::Zero(4, 4);
  const double t[2] = {t0, t1};
  for (int j = 0; j < 2; ++j) {
    s(2 * j, 2 * j) = std::cos(t[j]);
    s(2 * j, 2 * j + 1) = std::sin(t[j]);
    s(2 * j + 1, 2 * j) = -std::sin(t[j]);
    s(2 * j + 1, 2 * j + 1) = std::cos(t[j]);
  }
  return s * cov * s.transpose();
}

}  // namespace

TEST_CASE("vacuum is not flagged") {
  const RMatrix vac = 0.5 * RMatrix::Identity(4, 4);
  CHECK(simon_criterion(vac).value >= 0.0);
  CHECK_FALSE(simon_criterion(vac).entangled);
  CHECK(duan_criterion(vac).value >= 0.0);
  CHECK_FALSE(duan_criterion(vac).entangled);
}

TEST_CASE("Bell-like state escapes both criteria") {
  const RMatrix cov = state_covariance(presets::bell_state());
  CHECK_NOTHROW(check_covariance(cov));
  CHECK(simon_criterion(cov).value >= 0.0);
  CHECK(duan_criterion(cov).value >= 0.0);
}

TEST_CASE("TMSV is flagged by both criteria") {
  const RMatrix cov = state_covariance(Tmsv{0.5});
  const BaselineResult s = simon_criterion(cov), d = duan_criterion(cov);
  CHECK(s.value < 0.0);
  CHECK(s.entangled);
  CHECK(d.value < 0.0);
  CHECK(d.entangled);
  CHECK(s.criterion == Criterion::Simon);
  CHECK(to_string(d.criterion) == "duan");
  // optimal EPR variance of the TMSV: 2 e^{-2r} - 2
  CHECK(d.value == doctest::Approx(2.0 * std::exp(-1.0) - 2.0).epsilon(1e-6));
}

TEST_CASE("criteria are invariant under local phase rotations") {
  for (const RMatrix& cov : {state_covariance(Tmsv{Complex{0.3, 0.4}}), state_covariance(presets::bell_state())}) {
    const RMatrix r = rotate(cov, 0.7, -1.9);
    CHECK(std::abs(simon_criterion(r).value - simon_criterion(cov).value) < 1e-8);
    CHECK(std::abs(duan_criterion(r).value - duan_criterion(cov).value) < 1e-8);
  }
}

TEST_CASE("covariance validation") {
  CHECK_THROWS_AS(check_covariance(RMatrix::Identity(3, 3)), Error);
  RMatrix asym = 0.5 * RMatrix::Identity(4, 4);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(check_covariance(asym), Error);
  try {
    simon_criterion(0.1 * RMatrix::Identity(4, 4));
    FAIL("expected InvalidCovariance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidCovariance);
  }
  RMatrix nan = 0.5 * RMatrix::Identity(4, 4);
  nan(2, 2) = NAN;
  CHECK_THROWS_AS(duan_criterion(nan), Error);
  CHECK_THROWS_AS(state_covariance(four_mode_cat(0.4)), Error);
}
