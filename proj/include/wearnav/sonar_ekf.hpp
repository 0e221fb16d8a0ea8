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

#ifndef WEARNAV__SONAR_EKF_HPP_
#define WEARNAV__SONAR_EKF_HPP_

#include "wearnav/core.hpp"

#include <array>
#include <functional>
#include <optional>

namespace wearnav::sonar
{

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Defaults are the measurement noise R = diag(0.09, 0.09) (0.3 std, squared)
/// and process noise Q = diag(0.001, 0) of the reference sonar belt, with unit
/// initial covariance.
struct SonarFusionConfig
{
  Mat2 r = Vec2(0.09, 0.09).asDiagonal();
  Mat2 q = Vec2(0.001, 0.0).asDiagonal();
  double initial_p_scale = 1.0;

  /// Throws kInvalidArgument unless r, q are symmetric with non-negative
  /// diagonals and initial_p_scale > 0.
  void validate() const;
};

struct SonarFusionState
{
  Vec2 x = Vec2::Zero();
  Mat2 p = Mat2::Zero();
  bool initialized = false;
};

/// Transition hook. The sonar belt uses the identity (obstacle distance is
/// quasi-static over one 40 ms ping cycle), but the predict step is written
/// against f and its Jacobian.
struct ProcessModel
{
  std::function<Vec2(const Vec2 &)> f;
  std::function<Mat2(const Vec2 &)> jacobian;

  static const ProcessModel & identity();
};

/// Measurement hook; identity means each sensor observes its own distance.
struct MeasurementModel
{
  std::function<Vec2(const Vec2 &)> h;
  std::function<Mat2(const Vec2 &)> jacobian;

  static const MeasurementModel & identity();
};

/// Which of the two sensors produced an echo this cycle.
using EchoMask = std::array<bool, 2>;

SonarFusionState init(const Vec2 & z, const SonarFusionConfig & cfg);

SonarFusionState predict(
  const SonarFusionState & s, const SonarFusionConfig & cfg,
  const ProcessModel & model = ProcessModel::identity());

/// Kalman update. Rows whose echo is missing are dropped from the update
/// (infinite measurement variance). Throws kUsage when uninitialized,
/// kInvalidMeasurement for non-positive valid components, kNumerical when the
/// innovation covariance is singular.
SonarFusionState update(
  const SonarFusionState & s, const Vec2 & z, const SonarFusionConfig & cfg,
  EchoMask valid = {true, true},
  const MeasurementModel & model = MeasurementModel::identity());

/// Mean of the two distance estimates; both sensors contribute equally.
double fused_distance(const SonarFusionState & s);

/// Drives one filter over a stream of paired readings: initializes on the first
/// cycle with an echo, runs predict+update afterwards, and resets once both
/// sensors lose their echo.
class PairFuser
{
public:
  explicit PairFuser(SonarFusionConfig cfg = {});

  /// Returns the fused distance, or nullopt when neither sensor has an echo.
  std::optional<double> step(const Vec2 & z, EchoMask valid);

  const SonarFusionState & state() const noexcept {return state_;}
  const SonarFusionConfig & config() const noexcept {return cfg_;}

private:
  SonarFusionConfig cfg_;
  SonarFusionState state_;
};

}  // namespace wearnav::sonar

#endif  // WEARNAV__SONAR_EKF_HPP_
