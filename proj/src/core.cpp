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

#include <cmath>

namespace wearnav
{

std::string_view to_string(ErrorCode code) noexcept
{
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvalidQuaternion: return "invalid quaternion";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kInvalidMeasurement: return "invalid measurement";
    case ErrorCode::kUsage: return "usage error";
    case ErrorCode::kNumerical: return "numerical error";
    case ErrorCode::kInsufficientData: return "insufficient data";
    case ErrorCode::kCalibrationDiverged: return "calibration diverged";
    case ErrorCode::kPropagation: return "propagation error";
    case ErrorCode::kAlignment: return "alignment error";
    case ErrorCode::kUndefinedRelative: return "undefined relative error";
    case ErrorCode::kComparison: return "comparison error";
    case ErrorCode::kScenario: return "scenario error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kUnsupportedLayout: return "unsupported layout";
    case ErrorCode::kInput: return "input error";
  }
  return "unknown error";
}

Mat3 skew(const Vec3 & v)
{
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
    v.z(), 0.0, -v.x(),
    -v.y(), v.x(), 0.0;
  return m;
}

bool all_finite(const Vec3 & v) noexcept
{
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

UnitQuaternion UnitQuaternion::from_components(double w, double x, double y, double z)
{
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::kInvalidQuaternion, "quaternion has zero or non-finite norm");
  }
  return UnitQuaternion({w / n, x / n, y / n, z / n});
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3 & axis, double angle)
{
  const double n = axis.norm();
  if (!(n > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rotation axis has zero norm");
  }
  const double s = std::sin(0.5 * angle) / n;
  return from_components(std::cos(0.5 * angle), axis.x() * s, axis.y() * s, axis.z() * s);
}

double UnitQuaternion::norm() const noexcept
{
  return std::sqrt(c_[0] * c_[0] + c_[1] * c_[1] + c_[2] * c_[2] + c_[3] * c_[3]);
}

UnitQuaternion UnitQuaternion::conjugate() const noexcept
{
  return UnitQuaternion({c_[0], -c_[1], -c_[2], -c_[3]});
}

Vec3 UnitQuaternion::rotate(const Vec3 & v) const noexcept
{
  // v' = v + 2w (u x v) + 2 u x (u x v), u the vector part
  const Vec3 u(c_[1], c_[2], c_[3]);
  const Vec3 t = 2.0 * u.cross(v);
  return v + c_[0] * t + u.cross(t);
}

Mat3 UnitQuaternion::to_matrix() const noexcept
{
  const double w = c_[0], x = c_[1], y = c_[2], z = c_[3];
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
    2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
    2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

Vec3 UnitQuaternion::to_rotation_vector() const noexcept
{
  double w = c_[0];
  Vec3 u(c_[1], c_[2], c_[3]);
  if (w < 0.0) {
    w = -w;
    u = -u;
  }
  const double s = u.norm();
  if (s < 1e-12) {
    return 2.0 * u;
  }
  const double angle = 2.0 * std::atan2(s, w);
  return u * (angle / s);
}

UnitQuaternion operator*(const UnitQuaternion & a, const UnitQuaternion & b) noexcept
{
  const auto & p = a.c_;
  const auto & q = b.c_;
  const double w = p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3];
  const double x = p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2];
  const double y = p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1];
  const double z = p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0];
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  return UnitQuaternion({w / n, x / n, y / n, z / n});
}

UnitQuaternion quat_normalize(double w, double x, double y, double z)
{
  return UnitQuaternion::from_components(w, x, y, z);
}

Vec3 quat_rotate(const UnitQuaternion & q, const Vec3 & v) noexcept
{
  return q.rotate(v);
}

UnitQuaternion quat_from_small_angle(const Vec3 & dtheta)
{
  const double angle = dtheta.norm();
  if (angle < 1e-8) {
    const Vec3 h = 0.5 * dtheta;
    return UnitQuaternion::from_components(1.0, h.x(), h.y(), h.z());
  }
  const double s = std::sin(0.5 * angle) / angle;
  return UnitQuaternion::from_components(
    std::cos(0.5 * angle), dtheta.x() * s, dtheta.y() * s, dtheta.z() * s);
}

std::string_view to_string(SonarChannel c) noexcept
{
  switch (c) {
    case SonarChannel::kLeft: return "left";
    case SonarChannel::kRight: return "right";
    case SonarChannel::kFront: return "front";
    case SonarChannel::kInclinedLeft: return "inclined_left";
    case SonarChannel::kInclinedRight: return "inclined_right";
  }
  return "unknown";
}

SonarChannel parse_channel(std::string_view name)
{
  for (auto c : kAllChannels) {
    if (to_string(c) == name) {
      return c;
    }
  }
  throw Error(ErrorCode::kParse, "unknown sonar channel '" + std::string(name) + "'");
}

}  // namespace wearnav
