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

#include "wearnav/core.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using wearnav::Error;
using wearnav::ErrorCode;
using wearnav::UnitQuaternion;
using wearnav::Vec3;

namespace
{

std::array<double, 4> comps(const UnitQuaternion & q)
{
  return {q.w(), q.x(), q.y(), q.z()};
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

}  // namespace

TEST(Quaternion, ZeroNormRejected)
{
  EXPECT_EQ(code_of([] {UnitQuaternion::from_components(0, 0, 0, 0);}),
    ErrorCode::kInvalidQuaternion);
  EXPECT_EQ(code_of([] {wearnav::quat_normalize(0, 0, 0, 0);}), ErrorCode::kInvalidQuaternion);
  EXPECT_EQ(code_of([] {wearnav::quat_normalize(NAN, 0, 0, 1);}), ErrorCode::kInvalidQuaternion);
}

TEST(Quaternion, NormalizeScales)
{
  const auto q = wearnav::quat_normalize(2, 0, 0, 0);
  EXPECT_DOUBLE_EQ(q.w(), 1.0);
  const auto r = wearnav::quat_normalize(1, 1, 1, 1);
  EXPECT_NEAR(r.x(), 0.5, 1e-15);
  EXPECT_NEAR(r.norm(), 1.0, 1e-15);
}

TEST(Quaternion, MatrixMatchesRodrigues)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 axis(u(rng), u(rng), u(rng));
    const double angle = 3.0 * u(rng);
    const auto q = UnitQuaternion::from_axis_angle(axis, angle);
    const Eigen::Matrix3d expected = oracle::rodrigues(axis, angle);
    EXPECT_LT((q.to_matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
    const Vec3 v(u(rng), u(rng), u(rng));
    EXPECT_LT((q.rotate(v) - expected * v).norm(), 1e-12);
    EXPECT_LT((wearnav::quat_rotate(q, v) - expected * v).norm(), 1e-12);
  }
}

TEST(Quaternion, ProductIsHamilton)
{
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto a = wearnav::quat_normalize(u(rng), u(rng), u(rng), u(rng));
    const auto b = wearnav::quat_normalize(u(rng), u(rng), u(rng), u(rng));
    const auto expected = oracle::hamilton(comps(a), comps(b));
    const auto got = comps(a * b);
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(got[k], expected[k], 1e-14);
    }
    // composition order: (a * b) rotates by b first
    const Vec3 v(u(rng), u(rng), u(rng));
    EXPECT_LT(((a * b).rotate(v) - a.rotate(b.rotate(v))).norm(), 1e-13);
  }
}

TEST(Quaternion, ConjugateInverts)
{
  const auto q = UnitQuaternion::from_axis_angle(Vec3(1, 2, 3), 0.7);
  const auto e = q * q.conjugate();
  EXPECT_NEAR(e.w(), 1.0, 1e-15);
  EXPECT_NEAR(Vec3(e.x(), e.y(), e.z()).norm(), 0.0, 1e-15);
}

TEST(Quaternion, SmallAngleExponential)
{
  const Vec3 dtheta(0.1, -0.2, 0.3);
  const auto q = wearnav::quat_from_small_angle(dtheta);
  const Eigen::Matrix3d expected = oracle::rodrigues(dtheta, dtheta.norm());
  EXPECT_LT((q.to_matrix() - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((q.to_rotation_vector() - dtheta).norm(), 1e-14);

  const auto tiny = wearnav::quat_from_small_angle(Vec3(1e-10, 0, 0));
  EXPECT_NEAR(tiny.x(), 5e-11, 1e-20);
  EXPECT_NEAR(tiny.norm(), 1.0, 1e-15);
  const auto zero = wearnav::quat_from_small_angle(Vec3::Zero());
  EXPECT_EQ(zero.w(), 1.0);
}

TEST(Quaternion, RotationVectorTakesShortWay)
{
  // 270 deg about z is -90 deg about z
  const auto q = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), 1.5 * M_PI);
  EXPECT_LT((q.to_rotation_vector() - Vec3(0, 0, -0.5 * M_PI)).norm(), 1e-12);
}

TEST(Core, SkewIsCrossProduct)
{
  const Vec3 a(1, -2, 3);
  const Vec3 b(0.5, 4, -1);
  EXPECT_LT((wearnav::skew(a) * b - a.cross(b)).norm(), 1e-15);
}

TEST(Core, GravityPointsDown)
{
  EXPECT_EQ(wearnav::enu_gravity(), Vec3(0, 0, -9.80665));
}

TEST(Core, ChannelNamesRoundTrip)
{
  for (auto c : wearnav::kAllChannels) {
    EXPECT_EQ(wearnav::parse_channel(wearnav::to_string(c)), c);
  }
  EXPECT_TRUE(wearnav::is_inclined(wearnav::SonarChannel::kInclinedLeft));
  EXPECT_FALSE(wearnav::is_inclined(wearnav::SonarChannel::kFront));
  EXPECT_EQ(code_of([] {wearnav::parse_channel("back");}), ErrorCode::kParse);
}

TEST(Core, ErrorCarriesCode)
{
  const Error e(ErrorCode::kAlignment, "no overlap");
  EXPECT_EQ(e.code(), ErrorCode::kAlignment);
  EXPECT_STREQ(e.what(), "no overlap");
  EXPECT_EQ(wearnav::to_string(ErrorCode::kParse), "parse error");
}
