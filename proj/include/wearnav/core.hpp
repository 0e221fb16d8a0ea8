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

#ifndef WEARNAV__CORE_HPP_
#define WEARNAV__CORE_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wearnav
{

/// Failure categories shared by every module. The C API maps these 1:1 onto
/// `wn_status` values, so the numbering is part of the ABI.
enum class ErrorCode : int
{
  kInvalidArgument = 1,
  kInvalidQuaternion,
  kDomain,
  kInvalidMeasurement,
  kUsage,
  kNumerical,
  kInsufficientData,
  kCalibrationDiverged,
  kPropagation,
  kAlignment,
  kUndefinedRelative,
  kComparison,
  kScenario,
  kParse,
  kIo,
  kUnsupportedLayout,
  kInput,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & what)
  : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept {return code_;}

private:
  ErrorCode code_;
};

/// Seconds since scenario start. Callers deliver already-aligned timestamps.
using Timestamp = double;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Standard gravity in the local ENU navigation frame (z up).
inline const Vec3 & enu_gravity()
{
  static const Vec3 g(0.0, 0.0, -9.80665);
  return g;
}

Mat3 skew(const Vec3 & v);

bool all_finite(const Vec3 & v) noexcept;

/// Hamilton, scalar-first, body-to-navigation unit quaternion. Every
/// operation that yields one renormalizes, so |q| = 1 holds to ~1e-15.
class UnitQuaternion
{
public:
  UnitQuaternion() = default;

  /// Normalizes (w, x, y, z); throws kInvalidQuaternion on zero or
  /// non-finite norm.
  static UnitQuaternion from_components(double w, double x, double y, double z);
  static UnitQuaternion identity() {return UnitQuaternion{};}
  static UnitQuaternion from_axis_angle(const Vec3 & axis, double angle);

  double w() const noexcept {return c_[0];}
  double x() const noexcept {return c_[1];}
  double y() const noexcept {return c_[2];}
  double z() const noexcept {return c_[3];}
  double norm() const noexcept;

  UnitQuaternion conjugate() const noexcept;
  Vec3 rotate(const Vec3 & v) const noexcept;
  /// Direction cosine matrix, body to navigation.
  Mat3 to_matrix() const noexcept;
  /// Rotation vector (axis * angle) with angle in [0, pi].
  Vec3 to_rotation_vector() const noexcept;

  friend UnitQuaternion operator*(const UnitQuaternion & a, const UnitQuaternion & b) noexcept;

private:
  explicit UnitQuaternion(const std::array<double, 4> & c) : c_(c) {}
  std::array<double, 4> c_{1.0, 0.0, 0.0, 0.0};
};

UnitQuaternion quat_normalize(double w, double x, double y, double z);
Vec3 quat_rotate(const UnitQuaternion & q, const Vec3 & v) noexcept;
/// Exponential map of a rotation vector. Below 1e-8 rad the first-order form
/// (1, dtheta/2) is used and then normalized.
UnitQuaternion quat_from_small_angle(const Vec3 & dtheta);

/// Body frame is forward-right-down; accel is specific force in m/s^2 and gyro
/// angular rate in rad/s.
struct ImuSample
{
  Timestamp t = 0.0;
  Vec3 accel = Vec3::Zero();
  Vec3 gyro = Vec3::Zero();
};

/// WGS84 geodetic fix; alt is ellipsoidal height in meters.
struct GpsFix
{
  Timestamp t = 0.0;
  double lat = 0.0;
  double lon = 0.0;
  double alt = 0.0;
};

enum class SonarChannel : int
{
  kLeft = 0,
  kRight,
  kFront,
  kInclinedLeft,
  kInclinedRight,
};

inline constexpr std::array<SonarChannel, 5> kAllChannels{
  SonarChannel::kLeft, SonarChannel::kRight, SonarChannel::kFront,
  SonarChannel::kInclinedLeft, SonarChannel::kInclinedRight};

inline constexpr bool is_inclined(SonarChannel c) noexcept
{
  return c == SonarChannel::kInclinedLeft || c == SonarChannel::kInclinedRight;
}

std::string_view to_string(SonarChannel c) noexcept;
/// Accepts the names produced by to_string(SonarChannel); throws kParse.
SonarChannel parse_channel(std::string_view name);

struct SonarPing
{
  Timestamp t = 0.0;
  SonarChannel channel = SonarChannel::kFront;
  double range = 0.0;
  bool valid = false;
};

}  // namespace wearnav

#endif  // WEARNAV__CORE_HPP_
