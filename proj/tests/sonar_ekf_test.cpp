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

#include "wearnav/sonar_ekf.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wearnav;
using namespace wearnav::sonar;

namespace
{

ErrorCode code_of(const std::function<void()> & fn)
{
  try {
    fn();
  } catch (const Error & e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST(SonarEkf, DefaultNoise)
{
  const SonarFusionConfig cfg;
  EXPECT_EQ(cfg.r(0, 0), 0.09);
  EXPECT_EQ(cfg.r(1, 1), 0.09);
  EXPECT_EQ(cfg.r(0, 1), 0.0);
  EXPECT_EQ(cfg.q(0, 0), 0.001);
  EXPECT_EQ(cfg.q(1, 1), 0.0);
  EXPECT_EQ(cfg.initial_p_scale, 1.0);
}

TEST(SonarEkf, SingleUpdateFromUnitCovariance)
{
  const SonarFusionConfig cfg;
  const auto s0 = init(Vec2(2.0, 2.0), cfg);
  const auto s1 = update(s0, Vec2(2.3, 1.9), cfg);
  const double expected = 0.09 / 1.09;
  EXPECT_NEAR(s1.p(0, 0), expected, 1e-9);
  EXPECT_NEAR(s1.p(1, 1), expected, 1e-9);
  EXPECT_NEAR(s1.p(0, 1), 0.0, 1e-15);
  // gain 1/1.09 on each axis
  EXPECT_NEAR(s1.x(0), 2.0 + 0.3 / 1.09, 1e-12);
  EXPECT_NEAR(s1.x(1), 2.0 - 0.1 / 1.09, 1e-12);
}

TEST(SonarEkf, MatchesJosephFormOracle)
{
  SonarFusionConfig cfg;
  cfg.r << 0.09, 0.01, 0.01, 0.04;
  cfg.q << 0.002, 0.0005, 0.0005, 0.001;
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0.0, 0.3);

  auto s = init(Vec2(1.5, 1.6), cfg);
  Eigen::VectorXd x = s.x;
  Eigen::MatrixXd p = s.p;
  for (int k = 0; k < 200; ++k) {
    const Vec2 z(1.5 + std::abs(noise(rng)), 1.5 + std::abs(noise(rng)));
    s = update(predict(s, cfg), z, cfg);
    p += cfg.q;
    const auto post = oracle::kalman_update(x, p, z, Eigen::Matrix2d::Identity(), cfg.r);
    x = post.x;
    p = post.p;
    ASSERT_LT((s.x - x).cwiseAbs().maxCoeff(), 1e-10);
    ASSERT_LT((s.p - p).cwiseAbs().maxCoeff(), 1e-10);
    ASSERT_NEAR(s.p(0, 1), s.p(1, 0), 1e-15);
  }
}

TEST(SonarEkf, MissingEchoDropsRow)
{
  const SonarFusionConfig cfg;
  const auto s0 = init(Vec2(2.0, 2.5), cfg);
  const auto s1 = update(s0, Vec2(2.4, 99.0), cfg, {true, false});

  Eigen::MatrixXd h(1, 2);
  h << 1.0, 0.0;
  Eigen::MatrixXd r(1, 1);
  r << 0.09;
  Eigen::VectorXd z(1);
  z << 2.4;
  const auto post = oracle::kalman_update(s0.x, s0.p, z, h, r);
  EXPECT_LT((s1.x - post.x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((s1.p - post.p).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(s1.x(1), 2.5);
  EXPECT_EQ(s1.p(1, 1), 1.0);

  const auto none = update(s0, Vec2(-1.0, -1.0), cfg, {false, false});
  EXPECT_EQ(none.x, s0.x);
  EXPECT_EQ(none.p, s0.p);
}

TEST(SonarEkf, NonlinearHooks)
{
  // Each sensor reports the square of its distance.
  const MeasurementModel squared{
    [](const Vec2 & x) {return Vec2(x(0) * x(0), x(1) * x(1));},
    [](const Vec2 & x) {return Mat2(Vec2(2 * x(0), 2 * x(1)).asDiagonal());}};
  const ProcessModel drift{
    [](const Vec2 & x) {return Vec2(0.9 * x(0) + 0.1 * x(1), x(1));},
    [](const Vec2 &) {return (Mat2() << 0.9, 0.1, 0.0, 1.0).finished();}};

  const SonarFusionConfig cfg;
  const auto s0 = init(Vec2(2.0, 3.0), cfg);
  const auto s1 = predict(s0, cfg, drift);
  EXPECT_NEAR(s1.x(0), 2.1, 1e-15);
  const Eigen::MatrixXd f = oracle::numeric_jacobian(
    [&](const Eigen::VectorXd & x) -> Eigen::VectorXd {return drift.f(x);}, s0.x);
  const Eigen::MatrixXd p_pred = f * s0.p * f.transpose() + cfg.q;
  EXPECT_LT((s1.p - p_pred).cwiseAbs().maxCoeff(), 1e-9);

  const Vec2 z(4.5, 9.2);
  const auto s2 = update(s1, z, cfg, {true, true}, squared);
  const Eigen::MatrixXd h = oracle::numeric_jacobian(
    [&](const Eigen::VectorXd & x) -> Eigen::VectorXd {return squared.h(x);}, s1.x);
  // EKF: linearize about the prior, innovation from the nonlinear model
  const Eigen::MatrixXd s = h * s1.p * h.transpose() + cfg.r;
  const Eigen::MatrixXd k = s1.p * h.transpose() * s.inverse();
  const Eigen::VectorXd x_post = s1.x + k * (z - squared.h(s1.x));
  EXPECT_LT((s2.x - x_post).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(SonarEkf, Errors)
{
  const SonarFusionConfig cfg;
  EXPECT_EQ(code_of([&] {update(SonarFusionState{}, Vec2(1, 1), cfg);}), ErrorCode::kUsage);
  EXPECT_EQ(code_of([&] {predict(SonarFusionState{}, cfg);}), ErrorCode::kUsage);
  const auto s = init(Vec2(1, 1), cfg);
  EXPECT_EQ(code_of([&] {update(s, Vec2(-0.5, 1), cfg);}), ErrorCode::kInvalidMeasurement);
  EXPECT_EQ(code_of([&] {init(Vec2(0, 1), cfg);}), ErrorCode::kInvalidMeasurement);

  SonarFusionConfig degenerate;
  degenerate.r.setZero();
  SonarFusionState zero_p = s;
  zero_p.p.setZero();
  EXPECT_EQ(code_of([&] {update(zero_p, Vec2(1, 1), degenerate);}), ErrorCode::kNumerical);

  SonarFusionConfig asym;
  asym.r(0, 1) = 0.05;
  EXPECT_EQ(code_of([&] {asym.validate();}), ErrorCode::kInvalidArgument);
  SonarFusionConfig bad_scale;
  bad_scale.initial_p_scale = 0.0;
  EXPECT_EQ(code_of([&] {bad_scale.validate();}), ErrorCode::kInvalidArgument);
}

TEST(SonarEkf, FusedDistanceIsMean)
{
  SonarFusionState s;
  s.x = Vec2(1.0, 3.0);
  EXPECT_EQ(code_of([&] {fused_distance(s);}), ErrorCode::kUsage);
  s.initialized = true;
  EXPECT_EQ(fused_distance(s), 2.0);
}

TEST(PairFuser, LifecycleAndReset)
{
  PairFuser f;
  EXPECT_FALSE(f.step(Vec2(0, 0), {false, false}).has_value());
  EXPECT_FALSE(f.state().initialized);

  // lone echo seeds both components
  const auto first = f.step(Vec2(0, 2.2), {false, true});
  ASSERT_TRUE(first.has_value());
  EXPECT_EQ(*first, 2.2);
  EXPECT_EQ(f.state().x, Vec2(2.2, 2.2));

  const auto second = f.step(Vec2(2.0, 2.4), {true, true});
  ASSERT_TRUE(second.has_value());
  const auto expected = update(predict(init(Vec2(2.2, 2.2), f.config()), f.config()),
      Vec2(2.0, 2.4), f.config());
  EXPECT_NEAR(*second, fused_distance(expected), 1e-15);

  EXPECT_FALSE(f.step(Vec2(0, 0), {false, false}).has_value());
  EXPECT_FALSE(f.state().initialized);
  EXPECT_EQ(*f.step(Vec2(3.0, 3.2), {true, true}), 3.1);
}

TEST(PairFuser, SteadyStateVarianceBelowRaw)
{
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 0.3);
  PairFuser f;
  std::vector<double> raw;
  std::vector<double> fused;
  for (int k = 0; k < 4000; ++k) {
    const Vec2 z(2.0 + n(rng), 2.0 + n(rng));
    const auto out = f.step(z, {true, true});
    if (k >= 100) {
      raw.push_back(z(0));
      fused.push_back(*out);
    }
  }
  EXPECT_LT(oracle::variance(fused), oracle::variance(raw));
}
