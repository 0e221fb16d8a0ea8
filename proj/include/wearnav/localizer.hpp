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

#ifndef WEARNAV__LOCALIZER_HPP_
#define WEARNAV__LOCALIZER_HPP_

#include "wearnav/core.hpp"
#include "wearnav/geo.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wearnav::loc
{

/// Position, velocity (ENU) and body-to-ENU attitude.
struct NominalState
{
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  UnitQuaternion q;
  Timestamp t = 0.0;
};

/// Error state ordering: dp (0..2), dv (3..5), dtheta (6..8). Attitude error
/// is expressed in the navigation frame: q_true = exp(dtheta) * q.
using ErrorState = Eigen::Matrix<double, 9, 1>;
using ErrorCovariance = Eigen::Matrix<double, 9, 9>;

struct LocalizerConfig
{
  double accel_noise = 0.3;   ///< per-sample accelerometer std, m/s^2
  double gyro_noise = 0.01;   ///< per-sample gyro std, rad/s
  double gps_pos_std = 3.0;   ///< per-axis GPS position std, m
  Vec3 gravity = enu_gravity();
  double imu_rate = 100.0;
  double gps_rate = 1.0;
  double gate = 5.0;          ///< innovation gate, in predicted std-devs per axis
  double max_dt = 0.1;

  void validate() const;
};

struct CalibrationOffsets
{
  Vec3 accel_offset = Vec3::Zero();
  Vec3 gyro_offset = Vec3::Zero();

  ImuSample apply(const ImuSample & raw) const;
};

struct CalibrationConfig
{
  int batch = 1000;
  double tol = 1e-3;
  int max_iter = 20;
  Vec3 gravity = enu_gravity();
};

struct CalibrationResult
{
  CalibrationOffsets offsets;
  int iterations = 0;  ///< offset adjustments applied
  int batches = 0;     ///< batches read, including the confirming one
  Vec3 accel_residual = Vec3::Zero();
  Vec3 gyro_residual = Vec3::Zero();
};

/// Yields the next raw reading of a stationary, level IMU.
using ImuSource = std::function<ImuSample()>;

/// Offset calibration for a level, stationary, z-down mounted IMU. Offsets
/// start at zero. Each iteration reads `batch` samples and forms the mean of
/// every reading collected so far, corrected by the current offsets; the gyro
/// target is zero and the accelerometer target the gravity reaction (0, 0, -g).
/// The residual is added to the offsets until all six axes are within `tol`.
/// Throws kCalibrationDiverged after `max_iter` adjustments.
CalibrationResult calibrate(const ImuSource & source, const CalibrationConfig & cfg = {});

struct Propagated
{
  NominalState state;
  ErrorCovariance cov;
};

/// Strapdown step over dt using `imu` (already offset-corrected).
/// Throws kPropagation for non-finite input or dt outside (0, max_dt].
Propagated propagate(
  const NominalState & s, const ErrorCovariance & cov, const ImuSample & imu,
  double dt, const LocalizerConfig & cfg);

/// Error-state transition matrix F used by propagate.
ErrorCovariance transition_matrix(const NominalState & s, const ImuSample & imu, double dt);

/// Applies an error-state correction to a nominal state.
NominalState inject(const NominalState & s, const ErrorState & dx);

/// Error state dx with inject(reference, dx) == actual (attitude via log map).
ErrorState error_between(const NominalState & actual, const NominalState & reference);

struct GpsUpdateResult
{
  NominalState state;
  ErrorCovariance cov;
  bool accepted = false;
  Vec3 innovation = Vec3::Zero();
  Vec3 innovation_std = Vec3::Zero();
};

/// Position correction with H = [I 0 0]. A fix whose innovation exceeds
/// gate * sqrt(S_ii) on any axis is rejected and the inputs are returned
/// unchanged with accepted = false.
GpsUpdateResult gps_update(
  const NominalState & s, const ErrorCovariance & cov, const geo::EnuCoord & fix_enu,
  const LocalizerConfig & cfg);

struct InitialConditions
{
  /// ENU origin; the first GPS fix when unset.
  std::optional<GpsFix> reference;
  /// Starting ENU position when the run has no fix; the origin when unset.
  std::optional<Vec3> position;
  Vec3 velocity = Vec3::Zero();
  UnitQuaternion attitude;
  /// Initial position std; gps_pos_std when unset.
  std::optional<double> pos_std;
  double vel_std = 0.5;
  double tilt_std = 0.02;  ///< roll/pitch, rad
  double yaw_std = 0.1;    ///< rad
};

/// Incremental ES-EKF. Owns the nominal state and error covariance and
/// consumes offset-corrected IMU samples and ENU fixes in time order.
class Localizer
{
public:
  Localizer(LocalizerConfig cfg, const NominalState & initial, const ErrorCovariance & cov);

  /// Propagates from the current time to `imu.t` using `imu` as the
  /// measurement held over the interval. Steps shorter than 1e-9 s only
  /// advance the clock.
  void propagate_to(const ImuSample & imu);
  GpsUpdateResult correct(const geo::EnuCoord & fix_enu);

  const NominalState & state() const noexcept {return state_;}
  const ErrorCovariance & covariance() const noexcept {return cov_;}
  const LocalizerConfig & config() const noexcept {return cfg_;}

private:
  LocalizerConfig cfg_;
  NominalState state_;
  ErrorCovariance cov_;
};

ErrorCovariance initial_covariance(const InitialConditions & init, const LocalizerConfig & cfg);

struct LocalizerRecord
{
  Timestamp t;
  Vec3 p;
  Vec3 v;
  UnitQuaternion q;
};

struct LocalizerRun
{
  std::vector<LocalizerRecord> records;
  GpsFix reference;
  int fixes_applied = 0;
  int fixes_rejected = 0;
};

/// Runs the filter over time-sorted streams, one record per IMU sample. The
/// first GPS fix initializes position; later fixes are applied at their own
/// timestamps by splitting the enclosing IMU interval. IMU samples earlier than
/// the first fix are skipped. Throws kInsufficientData for an empty IMU stream
/// (or no fix and no reference) and kInput for out-of-order samples.
LocalizerRun run_localizer(
  std::span<const ImuSample> imu, std::span<const GpsFix> gps,
  const LocalizerConfig & cfg, const CalibrationOffsets & offsets,
  const InitialConditions & init = {});

}  // namespace wearnav::loc

#endif  // WEARNAV__LOCALIZER_HPP_
