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

#ifndef WEARNAV__SIM_HPP_
#define WEARNAV__SIM_HPP_

#include "wearnav/core.hpp"
#include "wearnav/localizer.hpp"
#include "wearnav/perception.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wearnav::sim
{

using Vec2 = Eigen::Vector2d;

struct NoiseModel
{
  double accel_sigma = 0.0;  ///< m/s^2 per sample
  double gyro_sigma = 0.0;   ///< rad/s per sample
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();
  double gps_sigma = 0.0;    ///< m, per horizontal axis
  double sonar_sigma = 0.003;  ///< m

  /// Low-noise motion-processor data path: IMU sigmas divided by 5, biases
  /// zeroed; GPS and sonar untouched.
  NoiseModel dmp_like() const;
};

/// Vertical cylinder.
struct Obstacle
{
  Vec2 center = Vec2::Zero();
  double radius = 0.2;
};

/// Floor lowered by `depth` within width/2 of the segment a-b.
struct DropOff
{
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  double width = 1.0;
  double depth = 0.5;
};

struct TimeWindow
{
  Timestamp start = 0.0;
  Timestamp end = 0.0;
  bool contains(Timestamp t) const noexcept {return t >= start && t <= end;}
};

struct SonarMount
{
  SonarChannel channel = SonarChannel::kFront;
  double yaw_deg = 0.0;         ///< counter-clockwise from walking direction
  double pitch_down_deg = 0.0;  ///< > 0 only for inclined channels
  int sensors = 1;
};

struct SonarGeometry
{
  std::vector<SonarMount> mounts;
  double mount_height = 1.0;
  double beam_half_angle_deg = 15.0;
  double max_range = 4.0;

  /// Five-channel waist belt: left/right at +/-90 deg, two redundant front
  /// sensors, inclined sensors at +/-30 deg yaw and 40 deg down.
  static SonarGeometry belt();
  /// Slant range to level floor for an inclined mount.
  double ground_range(const SonarMount & m) const;
  const SonarMount & mount(SonarChannel c) const;
};

struct Scenario
{
  std::string name = "scenario";
  std::vector<Vec2> route;  ///< ENU east/north waypoints relative to anchor
  double speed = 1.52;
  double imu_rate = 100.0;
  double gps_rate = 1.0;
  double sonar_rate = 25.0;
  double corner_blend = 1.0;
  GpsFix anchor{0.0, 51.5074, -0.1278, 35.0};
  NoiseModel noise;
  std::vector<Obstacle> obstacles;
  std::vector<DropOff> dropoffs;
  std::vector<TimeWindow> gps_dropouts;
  SonarGeometry sonar = SonarGeometry::belt();
  std::uint64_t seed = 1;

  /// Throws kScenario describing the first violated constraint.
  void validate() const;
};

struct TruthSample
{
  Timestamp t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();          ///< kinematic acceleration, ENU
  UnitQuaternion q;
  Vec3 body_rate = Vec3::Zero();  ///< angular rate, body frame
};

struct GroundTruth
{
  std::vector<TruthSample> samples;
  double duration = 0.0;
  double path_length = 0.0;

  /// Linear interpolation of position/velocity; attitude from the nearest sample.
  TruthSample at(Timestamp t) const;
};

/// Arc-length parametrized route: straight legs joined by quadratic Bezier
/// blends spanning `blend` meters around each interior corner.
class WalkPath
{
public:
  WalkPath(std::span<const Vec2> route, double blend);

  double length() const noexcept {return total_;}

  struct Point
  {
    Vec2 p;
    Vec2 tangent;
    double curvature;  ///< signed, positive = turning left
  };
  Point at(double s) const;

private:
  struct Piece
  {
    bool curved;
    Vec2 a, c, b;  ///< line a->b, or Bezier a (start), c (control), b (end)
    double s0;
    double length;
  };
  Point eval(const Piece & piece, double ds) const;

  std::vector<Piece> pieces_;
  double total_ = 0.0;
};

/// Heading (rad, CCW from east) to body-to-ENU attitude for a level,
/// forward-right-down mounted sensor.
UnitQuaternion level_attitude(double heading);

/// Constant-speed traversal sampled at imu_rate, plus an exact end sample when
/// the duration is off-grid.
GroundTruth gen_walk(const Scenario & scenario);

/// Stationary truth at `p` facing `heading`, sampled at `rate` for `duration`.
GroundTruth stationary_truth(const Vec3 & p, double heading, double duration, double rate);

/// Independent generator per (seed, stream) pair.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

std::vector<ImuSample> synth_imu(
  const GroundTruth & truth, const NoiseModel & noise, std::uint64_t seed,
  const Vec3 & gravity = enu_gravity());

/// Endless stationary level readings for calibration runs.
loc::ImuSource stationary_imu_source(
  const NoiseModel & noise, std::uint64_t seed, double rate = 100.0,
  const Vec3 & gravity = enu_gravity());

/// Fixes at t = 0, 1/rate, ... <= duration with N(0, sigma^2) east/north noise,
/// skipping dropout windows.
std::vector<GpsFix> synth_gps(
  const GroundTruth & truth, const GpsFix & anchor, double sigma, double rate,
  std::span<const TimeWindow> dropouts, std::uint64_t seed);

using SonarCycle = std::pair<Timestamp, std::vector<perception::ChannelReading>>;

struct SonarStreams
{
  /// Per cycle: channels in enum order, redundant sensors consecutive.
  std::vector<SonarPing> pings;
  /// Noiseless per-channel range per cycle.
  std::vector<SonarCycle> truth;
};

SonarStreams synth_sonar(
  const GroundTruth & truth, std::span<const Obstacle> obstacles,
  std::span<const DropOff> dropoffs, const SonarGeometry & geometry, double sigma,
  double rate, std::uint64_t seed);

/// Noiseless range for one mount at one pose; nullopt when nothing is in range.
std::optional<double> true_range(
  const Vec3 & position, double heading, const SonarMount & mount,
  std::span<const Obstacle> obstacles, std::span<const DropOff> dropoffs,
  const SonarGeometry & geometry);

/// All streams of a scenario, with `mode_dmp` selecting the low-noise IMU path.
struct SimulationOutput
{
  GroundTruth truth;
  std::vector<ImuSample> imu;
  std::vector<GpsFix> gps;
  SonarStreams sonar;
};

SimulationOutput simulate(const Scenario & scenario, bool mode_dmp, bool gps_enabled);

}  // namespace wearnav::sim

#endif  // WEARNAV__SIM_HPP_
