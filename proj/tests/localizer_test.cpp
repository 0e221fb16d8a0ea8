// Copyright 2026 The wearnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wearnav/localizer.hpp"
#include "wearnav/geo.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wearnav;
using namespace wearnav::loc;

namespace
{

constexpr double kG = 9.80665;

/// Level, forward-right-down body facing east.
UnitQuaternion facing_east()
{
  return UnitQuaternion::from_axis_angle(Vec3::UnitX(), M_PI);
}

ImuSample at_rest(double t)
{
  return {t, Vec3(0, 0, -kG), Vec3::Zero()};
}

ErrorCode code_of(const std::function<void()> & fn)
{
  try {
    fn();
  } catch (const Error & e) {
    return e.code();
  }
  return ErrorCode{};
}

NominalState sample_state()
{
  NominalState s;
  s.p = Vec3(3, -2, 1);
  s.v = Vec3(1.2, 0.4, -0.1);
  s.q = UnitQuaternion::from_axis_angle(Vec3(0.2, 0.1, 1.0), 0.8) * facing_east();
  s.t = 5.0;
  return s;
}

}  // namespace

TEST(Propagate, StationaryStaysPut)
{
  NominalState s;
  s.q = facing_east();
  ErrorCovariance p = ErrorCovariance::Identity();
  const LocalizerConfig cfg;
  for (int k = 0; k < 1000; ++k) {
    const auto out = propagate(s, p, at_rest(0), 0.01, cfg);
    s = out.state;
    p = out.cov;
  }
  EXPECT_LT(s.p.norm(), 1e-9);
  EXPECT_LT(s.v.norm(), 1e-10);
  EXPECT_NEAR(s.t, 10.0, 1e-9);
}

TEST(Propagate, ConstantForwardAcceleration)
{
  NominalState s;
  s.q = facing_east();
  const double a = 0.7;
  const ImuSample imu{0, Vec3(a, 0, -kG), Vec3::Zero()};
  const LocalizerConfig cfg;
  ErrorCovariance p = ErrorCovariance::Zero();
  for (int k = 0; k < 500; ++k) {
    auto out = propagate(s, p, imu, 0.01, cfg);
    s = out.state;
  }
  const double t = 5.0;
  EXPECT_NEAR(s.p.x(), 0.5 * a * t * t, 1e-9);
  EXPECT_NEAR(s.v.x(), a * t, 1e-10);
  EXPECT_NEAR(s.p.y(), 0.0, 1e-12);
  EXPECT_NEAR(s.p.z(), 0.0, 1e-9);
}

TEST(Propagate, YawRateTurnsLeft)
{
  NominalState s;
  s.q = facing_east();
  const double w = 0.3;
  // body z points down, so a left (counter-clockwise) turn is negative body z rate
  const ImuSample imu{0, Vec3(0, 0, -kG), Vec3(0, 0, -w)};
  const LocalizerConfig cfg;
  for (int k = 0; k < 200; ++k) {
    s = propagate(s, ErrorCovariance::Zero(), imu, 0.01, cfg).state;
  }
  const Eigen::Matrix3d expected =
    oracle::rodrigues(Vec3::UnitZ(), w * 2.0) * oracle::rodrigues(Vec3::UnitX(), M_PI);
  EXPECT_LT((s.q.to_matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Propagate, TransitionMatrixIsErrorJacobian)
{
  const NominalState s = sample_state();
  const ImuSample imu{0, Vec3(0.5, -0.3, -9.6), Vec3(0.02, -0.01, 0.2)};
  const LocalizerConfig cfg;
  const double dt = 0.01;
  const NominalState nominal = propagate(s, ErrorCovariance::Zero(), imu, dt, cfg).state;

  const Eigen::MatrixXd numeric = oracle::numeric_jacobian(
    [&](const Eigen::VectorXd & dx) -> Eigen::VectorXd {
      const NominalState perturbed = inject(s, ErrorState(dx));
      const auto next = propagate(perturbed, ErrorCovariance::Zero(), imu, dt, cfg).state;
      return error_between(next, nominal);
    }, ErrorState::Zero(), 1e-6);

  const ErrorCovariance f = transition_matrix(s, imu, dt);
  EXPECT_LT((f - numeric).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Propagate, CovarianceFollowsLinearModel)
{
  const NominalState s = sample_state();
  const ImuSample imu{0, Vec3(0.5, -0.3, -9.6), Vec3(0.02, -0.01, 0.2)};
  LocalizerConfig cfg;
  cfg.accel_noise = 0.25;
  cfg.gyro_noise = 0.015;
  const double dt = 0.02;

  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Eigen::Matrix<double, 9, 9> a;
  for (int i = 0; i < 81; ++i) {
    a(i) = n(rng);
  }
  const ErrorCovariance p = a * a.transpose() * 0.01;
  const auto out = propagate(s, p, imu, dt, cfg);

  const Eigen::MatrixXd f = transition_matrix(s, imu, dt);
  Eigen::MatrixXd qd = Eigen::MatrixXd::Zero(9, 9);
  for (int i = 3; i < 6; ++i) {
    qd(i, i) = std::pow(cfg.accel_noise * dt, 2);
    qd(i + 3, i + 3) = std::pow(cfg.gyro_noise * dt, 2);
  }
  const Eigen::MatrixXd expected = f * p * f.transpose() + qd;
  EXPECT_LT((out.cov - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(out.cov, out.cov.transpose());
}

TEST(Propagate, RejectsBadSteps)
{
  const NominalState s = sample_state();
  const LocalizerConfig cfg;
  const auto p = ErrorCovariance::Identity();
  EXPECT_EQ(code_of([&] {propagate(s, p, at_rest(0), 0.0, cfg);}), ErrorCode::kPropagation);
  EXPECT_EQ(code_of([&] {propagate(s, p, at_rest(0), 0.5, cfg);}), ErrorCode::kPropagation);
  ImuSample bad = at_rest(0);
  bad.gyro.x() = NAN;
  EXPECT_EQ(code_of([&] {propagate(s, p, bad, 0.01, cfg);}), ErrorCode::kPropagation);
}

TEST(ErrorState, InjectAndRecover)
{
  const NominalState s = sample_state();
  ErrorState dx;
  dx << 0.1, -0.2, 0.3, 0.01, 0.02, -0.03, 0.004, -0.005, 0.006;
  const auto t = inject(s, dx);
  EXPECT_LT((error_between(t, s) - dx).cwiseAbs().maxCoeff(), 1e-14);
  // attitude error is applied on the navigation side
  const Eigen::Matrix3d expected = oracle::rodrigues(dx.tail<3>(), dx.tail<3>().norm()) *
    s.q.to_matrix();
  EXPECT_LT((t.q.to_matrix() - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(GpsUpdate, MatchesKalmanOracle)
{
  const NominalState s = sample_state();
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n;
  Eigen::Matrix<double, 9, 9> a;
  for (int i = 0; i < 81; ++i) {
    a(i) = n(rng);
  }
  const ErrorCovariance p = a * a.transpose() * 0.05 + ErrorCovariance::Identity() * 0.1;
  LocalizerConfig cfg;
  cfg.gps_pos_std = 2.0;
  const geo::EnuCoord fix{s.p.x() + 1.0, s.p.y() - 0.5, s.p.z() + 0.2};

  const auto res = gps_update(s, p, fix, cfg);
  ASSERT_TRUE(res.accepted);

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3, 9);
  h.leftCols(3).setIdentity();
  const auto post = oracle::kalman_update(Eigen::VectorXd::Zero(9), p, fix.vec() - s.p, h,
      Eigen::Matrix3d::Identity() * 4.0);
  EXPECT_LT((res.state.p - (s.p + post.x.head(3))).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((res.state.v - (s.v + post.x.segment(3, 3))).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((error_between(res.state, s) - post.x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((res.cov - post.p).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((res.innovation_std - (p.diagonal().head(3).array() + 4.0).sqrt().matrix()).norm(),
    1e-12);
}

TEST(GpsUpdate, GateRejectsOutliers)
{
  const NominalState s = sample_state();
  const ErrorCovariance p = ErrorCovariance::Identity();
  LocalizerConfig cfg;
  cfg.gps_pos_std = 1.0;
  // innovation std sqrt(2); 5 sigma is about 7.07 m
  const auto far = gps_update(s, p, {s.p.x() + 7.2, s.p.y(), s.p.z()}, cfg);
  EXPECT_FALSE(far.accepted);
  EXPECT_EQ(far.state.p, s.p);
  EXPECT_EQ(far.cov, p);
  const auto near = gps_update(s, p, {s.p.x() + 7.0, s.p.y(), s.p.z()}, cfg);
  EXPECT_TRUE(near.accepted);
  EXPECT_EQ(code_of([&] {gps_update(s, p, {NAN, 0, 0}, cfg);}), ErrorCode::kInvalidMeasurement);
}

namespace
{

ImuSource noisy_source(Vec3 accel_bias, Vec3 gyro_bias, double sigma, std::uint64_t seed)
{
  auto rng = std::make_shared<std::mt19937_64>(seed);
  auto n = std::make_shared<std::normal_distribution<double>>(0.0, sigma);
  return [=]() {
           ImuSample s;
           for (int i = 0; i < 3; ++i) {
             s.accel(i) = accel_bias(i) + (*n)(*rng);
             s.gyro(i) = gyro_bias(i) + (*n)(*rng);
           }
           s.accel.z() -= kG;
           return s;
         };
}

}  // namespace

TEST(Calibration, NoiselessConvergesInOneAdjustment)
{
  const Vec3 ab(0.12, -0.07, 0.2);
  const Vec3 gb(0.003, 0.001, -0.002);
  const auto r = calibrate(noisy_source(ab, gb, 0.0, 1));
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.batches, 2);
  EXPECT_LT((r.offsets.accel_offset - ab).norm(), 1e-12);
  EXPECT_LT((r.offsets.gyro_offset - gb).norm(), 1e-12);
}

TEST(Calibration, RecoversOffsetsWithinSampleNoise)
{
  const double sigma = 0.05;
  const Vec3 ab(0.12, -0.07, 0.2);
  const Vec3 gb(0.003, 0.001, -0.002);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = calibrate(noisy_source(ab, gb, sigma, seed));
    EXPECT_LE(r.iterations, 20);
    const double bound = 3.0 * sigma / std::sqrt(1000.0);
    EXPECT_LT((r.offsets.accel_offset - ab).cwiseAbs().maxCoeff(), bound) << "seed " << seed;
    EXPECT_LT((r.offsets.gyro_offset - gb).cwiseAbs().maxCoeff(), bound) << "seed " << seed;
    const ImuSample corrected = r.offsets.apply({0, ab + Vec3(0, 0, -kG), gb});
    EXPECT_LT(corrected.gyro.norm(), bound * 2);
  }
}

TEST(Calibration, DivergesWhenToleranceUnreachable)
{
  CalibrationConfig cfg;
  cfg.tol = 1e-9;
  cfg.max_iter = 3;
  try {
    calibrate(noisy_source(Vec3::Zero(), Vec3::Zero(), 0.5, 3), cfg);
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.code(), ErrorCode::kCalibrationDiverged);
    EXPECT_NE(std::string(e.what()).find("3 iterations"), std::string::npos);
  }
  cfg.batch = 0;
  EXPECT_EQ(code_of([&] {calibrate(noisy_source(Vec3::Zero(), Vec3::Zero(), 0.0, 1), cfg);}),
    ErrorCode::kInvalidArgument);
}

namespace
{

std::vector<ImuSample> resting(double duration, double rate, const Vec3 & accel_bias = Vec3::Zero())
{
  std::vector<ImuSample> out;
  const int n = static_cast<int>(std::round(duration * rate));
  for (int k = 0; k <= n; ++k) {
    ImuSample s = at_rest(k / rate);
    s.accel += accel_bias;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(RunLocalizer, StationaryWithFixes)
{
  const GpsFix ref{0, 40.0, -3.0, 600.0};
  std::vector<GpsFix> fixes;
  for (int k = 0; k <= 10; ++k) {
    fixes.push_back({static_cast<double>(k), ref.lat, ref.lon, ref.alt});
  }
  InitialConditions init;
  init.attitude = facing_east();
  const auto run = run_localizer(resting(10, 100), fixes, LocalizerConfig{}, {}, init);
  EXPECT_EQ(run.records.size(), 1001u);
  EXPECT_EQ(run.fixes_applied, 10);
  EXPECT_EQ(run.fixes_rejected, 0);
  EXPECT_LT(run.records.back().p.norm(), 1e-6);
  EXPECT_EQ(run.reference.lat, ref.lat);
}

TEST(RunLocalizer, SkipsSamplesBeforeFirstFix)
{
  const GpsFix ref{2.0, 40.0, -3.0, 600.0};
  InitialConditions init;
  init.attitude = facing_east();
  const auto run = run_localizer(resting(5, 100), std::vector<GpsFix>{ref}, LocalizerConfig{}, {}, init);
  EXPECT_EQ(run.records.size(), 301u);
  EXPECT_DOUBLE_EQ(run.records.front().t, 2.0);
}

TEST(RunLocalizer, FixesSplitImuIntervals)
{
  // A fix that lands between IMU ticks must not change the record count.
  const GpsFix ref{0, 40.0, -3.0, 600.0};
  std::vector<GpsFix> fixes{ref, {0.505, ref.lat, ref.lon, ref.alt}};
  InitialConditions init;
  init.attitude = facing_east();
  const auto run = run_localizer(resting(1, 100), fixes, LocalizerConfig{}, {}, init);
  EXPECT_EQ(run.records.size(), 101u);
  EXPECT_EQ(run.fixes_applied, 1);
}

TEST(RunLocalizer, OffsetsAreApplied)
{
  const Vec3 bias(0.2, 0.0, 0.0);
  InitialConditions init;
  init.reference = GpsFix{0, 40.0, -3.0, 600.0};
  init.attitude = facing_east();
  CalibrationOffsets offsets;
  offsets.accel_offset = bias;
  const auto run = run_localizer(resting(10, 100, bias), {}, LocalizerConfig{}, offsets, init);
  EXPECT_LT(run.records.back().p.norm(), 1e-9);
}

TEST(RunLocalizer, BiasDriftFollowsHalfBTSquared)
{
  const Vec3 bias(0.05, -0.03, 0.0);
  InitialConditions init;
  init.reference = GpsFix{0, 40.0, -3.0, 600.0};
  init.position = Vec3(1, 2, 0);
  init.attitude = facing_east();
  const auto run = run_localizer(resting(10, 100, bias), {}, LocalizerConfig{}, {}, init);
  const Vec3 err = run.records.back().p - Vec3(1, 2, 0);
  // body to ENU: x stays, y and z flip sign
  const double expected = 0.5 * bias.norm() * 100.0;
  EXPECT_NEAR(err.norm(), expected, 1e-9);
  EXPECT_NEAR(err.x(), 0.5 * 0.05 * 100.0, 1e-9);
  EXPECT_NEAR(err.y(), 0.5 * 0.03 * 100.0, 1e-9);
}

TEST(RunLocalizer, InputErrors)
{
  const GpsFix ref{0, 40.0, -3.0, 600.0};
  auto imu = resting(1, 100);
  std::swap(imu[10], imu[11]);
  EXPECT_EQ(code_of([&] {run_localizer(imu, std::vector<GpsFix>{ref}, {}, {}, {});}),
    ErrorCode::kInput);
  EXPECT_EQ(code_of([&] {run_localizer({}, std::vector<GpsFix>{ref}, {}, {}, {});}),
    ErrorCode::kInsufficientData);
  EXPECT_EQ(code_of([&] {run_localizer(resting(1, 100), {}, {}, {}, {});}),
    ErrorCode::kInsufficientData);
  const std::vector<GpsFix> late{{5.0, ref.lat, ref.lon, ref.alt}};
  EXPECT_EQ(code_of([&] {run_localizer(resting(1, 100), late, {}, {}, {});}),
    ErrorCode::kInsufficientData);
}

TEST(Localizer, ClockOnlyAdvancesForward)
{
  NominalState s;
  s.q = facing_east();
  Localizer f(LocalizerConfig{}, s, ErrorCovariance::Identity());
  f.propagate_to(at_rest(0.01));
  EXPECT_DOUBLE_EQ(f.state().t, 0.01);
  f.propagate_to(at_rest(0.01));
  EXPECT_DOUBLE_EQ(f.state().t, 0.01);
  EXPECT_EQ(code_of([&] {f.propagate_to(at_rest(0.0));}), ErrorCode::kInput);
  EXPECT_EQ(code_of([&] {f.propagate_to(at_rest(1.0));}), ErrorCode::kPropagation);
}

TEST(Localizer, InitialCovarianceLayout)
{
  InitialConditions init;
  init.pos_std = 2.0;
  init.vel_std = 0.3;
  init.tilt_std = 0.01;
  init.yaw_std = 0.2;
  const auto p = initial_covariance(init, LocalizerConfig{});
  EXPECT_EQ(p(0, 0), 4.0);
  EXPECT_NEAR(p(4, 4), 0.09, 1e-15);
  EXPECT_NEAR(p(6, 6), 1e-4, 1e-18);
  EXPECT_NEAR(p(8, 8), 0.04, 1e-15);
  EXPECT_EQ(p(0, 1), 0.0);
  init.pos_std.reset();
  EXPECT_EQ(initial_covariance(init, LocalizerConfig{})(2, 2), 9.0);
}
