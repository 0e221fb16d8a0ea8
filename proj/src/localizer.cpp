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

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <sstream>

namespace wearnav::loc
{
namespace
{

constexpr double kMinStep = 1e-9;

bool finite_state(const NominalState & s)
{
  return all_finite(s.p) && all_finite(s.v) && std::isfinite(s.t) &&
         std::isfinite(s.q.w()) && std::isfinite(s.q.x()) &&
         std::isfinite(s.q.y()) && std::isfinite(s.q.z());
}

ErrorCovariance symmetrized(const ErrorCovariance & m)
{
  return 0.5 * (m + m.transpose());
}

}  // namespace

void LocalizerConfig::validate() const
{
  if (!(accel_noise > 0.0) || !(gyro_noise > 0.0) || !(gps_pos_std > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "localizer noise parameters must be > 0");
  }
  if (!(imu_rate > 0.0) || !(gps_rate > 0.0) || !(gate > 0.0) || !(max_dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "localizer rates, gate and max_dt must be > 0");
  }
  if (!all_finite(gravity)) {
    throw Error(ErrorCode::kInvalidArgument, "gravity must be finite");
  }
}

ImuSample CalibrationOffsets::apply(const ImuSample & raw) const
{
  ImuSample out = raw;
  out.accel -= accel_offset;
  out.gyro -= gyro_offset;
  return out;
}

CalibrationResult calibrate(const ImuSource & source, const CalibrationConfig & cfg)
{
  if (cfg.batch <= 0 || !(cfg.tol > 0.0) || cfg.max_iter < 0) {
    throw Error(ErrorCode::kInvalidArgument, "calibration needs batch > 0, tol > 0, max_iter >= 0");
  }
  const Vec3 accel_target(0.0, 0.0, -cfg.gravity.norm());

  CalibrationResult result;
  Vec3 accel_sum = Vec3::Zero();
  Vec3 gyro_sum = Vec3::Zero();
  long count = 0;

  for (;;) {
    for (int i = 0; i < cfg.batch; ++i) {
      const ImuSample s = source();
      if (!all_finite(s.accel) || !all_finite(s.gyro)) {
        throw Error(ErrorCode::kInput, "calibration source produced a non-finite reading");
      }
      accel_sum += s.accel;
      gyro_sum += s.gyro;
    }
    count += cfg.batch;
    ++result.batches;

    const double n = static_cast<double>(count);
    result.accel_residual = accel_sum / n - result.offsets.accel_offset - accel_target;
    result.gyro_residual = gyro_sum / n - result.offsets.gyro_offset;

    const bool converged =
      result.accel_residual.cwiseAbs().maxCoeff() <= cfg.tol &&
      result.gyro_residual.cwiseAbs().maxCoeff() <= cfg.tol;
    if (converged) {
      return result;
    }
    if (result.iterations >= cfg.max_iter) {
      std::ostringstream msg;
      msg << "calibration did not reach tol " << cfg.tol << " after " << cfg.max_iter
          << " iterations; residual accel (" << result.accel_residual.transpose()
          << ") gyro (" << result.gyro_residual.transpose() << ")";
      throw Error(ErrorCode::kCalibrationDiverged, msg.str());
    }
    result.offsets.accel_offset += result.accel_residual;
    result.offsets.gyro_offset += result.gyro_residual;
    ++result.iterations;
  }
}

ErrorCovariance transition_matrix(const NominalState & s, const ImuSample & imu, double dt)
{
  const Mat3 accel_skew = skew(s.q.rotate(imu.accel));
  ErrorCovariance f = ErrorCovariance::Identity();
  f.block<3, 3>(0, 3) = Mat3::Identity() * dt;
  f.block<3, 3>(0, 6) = -0.5 * accel_skew * dt * dt;
  f.block<3, 3>(3, 6) = -accel_skew * dt;
  return f;
}

Propagated propagate(
  const NominalState & s, const ErrorCovariance & cov, const ImuSample & imu,
  double dt, const LocalizerConfig & cfg)
{
  if (!finite_state(s) || !all_finite(imu.accel) || !all_finite(imu.gyro) ||
    !cov.allFinite() || !std::isfinite(dt))
  {
    throw Error(ErrorCode::kPropagation, "non-finite input to propagate");
  }
  if (!(dt > 0.0) || dt > cfg.max_dt) {
    throw Error(ErrorCode::kPropagation,
            "propagation step " + std::to_string(dt) + " s outside (0, max_dt]");
  }

  const Vec3 a_nav = s.q.rotate(imu.accel) + cfg.gravity;
  Propagated out;
  out.state.p = s.p + s.v * dt + 0.5 * a_nav * dt * dt;
  out.state.v = s.v + a_nav * dt;
  out.state.q = s.q * quat_from_small_angle(imu.gyro * dt);
  out.state.t = s.t + dt;

  const ErrorCovariance f = transition_matrix(s, imu, dt);
  ErrorCovariance qd = ErrorCovariance::Zero();
  qd.block<3, 3>(3, 3) = Mat3::Identity() * (cfg.accel_noise * cfg.accel_noise * dt * dt);
  qd.block<3, 3>(6, 6) = Mat3::Identity() * (cfg.gyro_noise * cfg.gyro_noise * dt * dt);
  out.cov = symmetrized(f * cov * f.transpose() + qd);
  return out;
}

NominalState inject(const NominalState & s, const ErrorState & dx)
{
  NominalState out = s;
  out.p += dx.segment<3>(0);
  out.v += dx.segment<3>(3);
  out.q = quat_from_small_angle(dx.segment<3>(6)) * s.q;
  return out;
}

ErrorState error_between(const NominalState & actual, const NominalState & reference)
{
  ErrorState dx;
  dx.segment<3>(0) = actual.p - reference.p;
  dx.segment<3>(3) = actual.v - reference.v;
  dx.segment<3>(6) = (actual.q * reference.q.conjugate()).to_rotation_vector();
  return dx;
}

GpsUpdateResult gps_update(
  const NominalState & s, const ErrorCovariance & cov, const geo::EnuCoord & fix_enu,
  const LocalizerConfig & cfg)
{
  GpsUpdateResult out;
  out.state = s;
  out.cov = cov;

  const Vec3 z = fix_enu.vec();
  if (!all_finite(z)) {
    throw Error(ErrorCode::kInvalidMeasurement, "GPS position is non-finite");
  }
  const double r = cfg.gps_pos_std * cfg.gps_pos_std;
  const Mat3 innov_cov = cov.block<3, 3>(0, 0) + r * Mat3::Identity();
  out.innovation = z - s.p;
  out.innovation_std = innov_cov.diagonal().cwiseSqrt();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(out.innovation(i)) > cfg.gate * out.innovation_std(i)) {
      return out;
    }
  }

  const Eigen::Matrix<double, 9, 3> gain = cov.block<9, 3>(0, 0) * innov_cov.inverse();
  const ErrorState dx = gain * out.innovation;
  Eigen::Matrix<double, 9, 9> ikh = ErrorCovariance::Identity();
  ikh.block<9, 3>(0, 0) -= gain;
  out.state = inject(s, dx);
  out.cov = symmetrized(ikh * cov);
  out.accepted = true;
  return out;
}

Localizer::Localizer(LocalizerConfig cfg, const NominalState & initial, const ErrorCovariance & cov)
: cfg_(std::move(cfg)), state_(initial), cov_(cov)
{
  cfg_.validate();
}

void Localizer::propagate_to(const ImuSample & imu)
{
  const double dt = imu.t - state_.t;
  if (dt < -kMinStep) {
    throw Error(ErrorCode::kInput, "IMU sample at t=" + std::to_string(imu.t) +
            " precedes filter time " + std::to_string(state_.t));
  }
  if (dt < kMinStep) {
    return;
  }
  auto next = propagate(state_, cov_, imu, dt, cfg_);
  next.state.t = imu.t;
  state_ = next.state;
  cov_ = next.cov;
}

GpsUpdateResult Localizer::correct(const geo::EnuCoord & fix_enu)
{
  auto res = gps_update(state_, cov_, fix_enu, cfg_);
  state_ = res.state;
  cov_ = res.cov;
  return res;
}

ErrorCovariance initial_covariance(const InitialConditions & init, const LocalizerConfig & cfg)
{
  const double ps = init.pos_std.value_or(cfg.gps_pos_std);
  ErrorCovariance p = ErrorCovariance::Zero();
  p.block<3, 3>(0, 0) = Mat3::Identity() * ps * ps;
  p.block<3, 3>(3, 3) = Mat3::Identity() * init.vel_std * init.vel_std;
  p(6, 6) = init.tilt_std * init.tilt_std;
  p(7, 7) = init.tilt_std * init.tilt_std;
  p(8, 8) = init.yaw_std * init.yaw_std;
  return p;
}

LocalizerRun run_localizer(
  std::span<const ImuSample> imu, std::span<const GpsFix> gps,
  const LocalizerConfig & cfg, const CalibrationOffsets & offsets,
  const InitialConditions & init)
{
  cfg.validate();
  if (imu.empty()) {
    throw Error(ErrorCode::kInsufficientData, "IMU stream is empty");
  }
  if (gps.empty() && !init.reference) {
    throw Error(ErrorCode::kInsufficientData, "no GPS fix and no ENU reference to anchor the run");
  }
  for (std::size_t i = 1; i < imu.size(); ++i) {
    if (imu[i].t < imu[i - 1].t) {
      throw Error(ErrorCode::kInput, "IMU stream out of order at sample " + std::to_string(i));
    }
  }
  for (std::size_t i = 1; i < gps.size(); ++i) {
    if (gps[i].t < gps[i - 1].t) {
      throw Error(ErrorCode::kInput, "GPS stream out of order at fix " + std::to_string(i));
    }
  }

  LocalizerRun run;
  run.reference = init.reference ? *init.reference : gps.front();
  const geo::LocalFrame frame(run.reference);

  const Timestamp t_start = gps.empty() ? imu.front().t : gps.front().t;
  std::size_t k = 0;
  while (k < imu.size() && imu[k].t < t_start - kMinStep) {
    ++k;
  }
  if (k == imu.size()) {
    throw Error(ErrorCode::kInsufficientData, "no IMU samples after the first GPS fix");
  }

  NominalState s0;
  s0.p = gps.empty() ? init.position.value_or(Vec3::Zero()) : frame.to_enu(gps.front()).vec();
  s0.v = init.velocity;
  s0.q = init.attitude;
  s0.t = imu[k].t;
  Localizer filter(cfg, s0, initial_covariance(init, cfg));

  std::size_t g = gps.empty() ? 0 : 1;
  auto apply_fix = [&](const GpsFix & fix) {
      if (filter.correct(frame.to_enu(fix)).accepted) {
        ++run.fixes_applied;
      } else {
        ++run.fixes_rejected;
      }
    };
  auto record = [&]() {
      const auto & s = filter.state();
      run.records.push_back({s.t, s.p, s.v, s.q});
    };

  while (g < gps.size() && gps[g].t <= s0.t + kMinStep) {
    apply_fix(gps[g++]);
  }
  record();

  run.records.reserve(imu.size() - k);
  for (std::size_t i = k + 1; i < imu.size(); ++i) {
    const ImuSample held = offsets.apply(imu[i - 1]);
    while (g < gps.size() && gps[g].t <= imu[i].t + kMinStep) {
      ImuSample split = held;
      split.t = std::min(gps[g].t, imu[i].t);
      filter.propagate_to(split);
      apply_fix(gps[g++]);
    }
    ImuSample step = held;
    step.t = imu[i].t;
    filter.propagate_to(step);
    record();
  }
  return run;
}

}  // namespace wearnav::loc
