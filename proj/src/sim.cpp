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

#include "wearnav/sim.hpp"

#include "wearnav/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace wearnav::sim
{
namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

enum Stream : std::uint64_t
{
  kImuStream = 1,
  kGpsStream = 2,
  kSonarStream = 3,
  kCalibrationStream = 4,
};

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlNodes{
  0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGlWeights{
  0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double cross2(const Vec2 & a, const Vec2 & b) {return a.x() * b.y() - a.y() * b.x();}

Vec2 bezier(const Vec2 & a, const Vec2 & c, const Vec2 & b, double u)
{
  return (1 - u) * (1 - u) * a + 2 * u * (1 - u) * c + u * u * b;
}

Vec2 bezier_d1(const Vec2 & a, const Vec2 & c, const Vec2 & b, double u)
{
  return 2 * (1 - u) * (c - a) + 2 * u * (b - c);
}

Vec2 bezier_d2(const Vec2 & a, const Vec2 & c, const Vec2 & b)
{
  return 2 * (a - 2 * c + b);
}

double bezier_arc(const Vec2 & a, const Vec2 & c, const Vec2 & b, double u)
{
  constexpr int kSub = 8;
  const double h = u / kSub;
  double sum = 0.0;
  for (int k = 0; k < kSub; ++k) {
    const double mid = (k + 0.5) * h;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
      const double dx = 0.5 * h * kGlNodes[i];
      sum += kGlWeights[i] * (bezier_d1(a, c, b, mid - dx).norm() + bezier_d1(a, c, b, mid + dx).norm());
    }
  }
  return 0.5 * h * sum;
}

double wrap_angle(double a)
{
  a = std::fmod(a + kPi, 2 * kPi);
  if (a < 0) {
    a += 2 * kPi;
  }
  return a - kPi;
}

double heading_of(const UnitQuaternion & q)
{
  const Vec3 fwd = q.rotate(Vec3::UnitX());
  return std::atan2(fwd.y(), fwd.x());
}

double segment_distance(const Vec2 & p, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double u = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + u * ab)).norm();
}

}  // namespace

NoiseModel NoiseModel::dmp_like() const
{
  NoiseModel out = *this;
  out.accel_sigma /= 5.0;
  out.gyro_sigma /= 5.0;
  out.accel_bias.setZero();
  out.gyro_bias.setZero();
  return out;
}

SonarGeometry SonarGeometry::belt()
{
  SonarGeometry g;
  g.mounts = {
    {SonarChannel::kLeft, 90.0, 0.0, 1},
    {SonarChannel::kRight, -90.0, 0.0, 1},
    {SonarChannel::kFront, 0.0, 0.0, 2},
    {SonarChannel::kInclinedLeft, 30.0, 40.0, 1},
    {SonarChannel::kInclinedRight, -30.0, 40.0, 1},
  };
  return g;
}

double SonarGeometry::ground_range(const SonarMount & m) const
{
  if (!(m.pitch_down_deg > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return mount_height / std::sin(m.pitch_down_deg * kDeg);
}

const SonarMount & SonarGeometry::mount(SonarChannel c) const
{
  for (const auto & m : mounts) {
    if (m.channel == c) {
      return m;
    }
  }
  throw Error(ErrorCode::kScenario, "no sonar mount for channel " + std::string(to_string(c)));
}

void Scenario::validate() const
{
  auto fail = [](const std::string & msg) {throw Error(ErrorCode::kScenario, msg);};
  if (route.size() < 2) {
    fail("route needs at least two waypoints");
  }
  for (std::size_t i = 1; i < route.size(); ++i) {
    if ((route[i] - route[i - 1]).norm() < 1e-6) {
      fail("route waypoint " + std::to_string(i) + " repeats the previous one");
    }
  }
  if (!(speed > 0.0)) {
    fail("speed must be > 0");
  }
  if (!(imu_rate > 0.0) || !(gps_rate > 0.0) || !(sonar_rate > 0.0)) {
    fail("rates must be > 0");
  }
  if (corner_blend < 0.0) {
    fail("corner_blend must be >= 0");
  }
  if (noise.accel_sigma < 0.0 || noise.gyro_sigma < 0.0 || noise.gps_sigma < 0.0 ||
    noise.sonar_sigma < 0.0)
  {
    fail("noise sigmas must be >= 0");
  }
  for (const auto & o : obstacles) {
    if (!(o.radius > 0.0)) {
      fail("obstacle radius must be > 0");
    }
  }
  for (const auto & d : dropoffs) {
    if (!(d.width > 0.0) || !(d.depth > 0.0)) {
      fail("drop-off width and depth must be > 0");
    }
  }
  for (const auto & m : sonar.mounts) {
    if (m.sensors < 1 || m.sensors > 2) {
      fail("each sonar channel carries one or two sensors");
    }
    if (is_inclined(m.channel) != (m.pitch_down_deg > 0.0)) {
      fail("only inclined channels may be pitched down");
    }
  }
  if (!(sonar.max_range > 0.0) || !(sonar.mount_height > 0.0) ||
    !(sonar.beam_half_angle_deg > 0.0))
  {
    fail("sonar geometry must be positive");
  }
  try {
    geo::validate_fix(anchor);
  } catch (const Error & e) {
    fail(std::string("anchor: ") + e.what());
  }
  // Also rejects U-turns.
  WalkPath(route, corner_blend);
}

WalkPath::WalkPath(std::span<const Vec2> route, double blend)
{
  const std::size_t n = route.size();
  if (n < 2) {
    throw Error(ErrorCode::kScenario, "route needs at least two waypoints");
  }
  std::vector<Vec2> dir(n - 1);
  std::vector<double> len(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 d = route[i + 1] - route[i];
    len[i] = d.norm();
    if (len[i] < 1e-6) {
      throw Error(ErrorCode::kScenario, "degenerate route: repeated waypoint " + std::to_string(i + 1));
    }
    dir[i] = d / len[i];
  }
  // Blend half-length at each interior corner.
  std::vector<double> half(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dot = dir[i - 1].dot(dir[i]);
    if (dot < -1.0 + 1e-9) {
      throw Error(ErrorCode::kScenario, "route reverses direction at waypoint " + std::to_string(i));
    }
    if (std::abs(cross2(dir[i - 1], dir[i])) > 1e-12) {
      half[i] = std::min({0.5 * blend, 0.5 * len[i - 1], 0.5 * len[i]});
    }
  }

  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 start = route[i] + half[i] * dir[i];
    const Vec2 end = route[i + 1] - half[i + 1] * dir[i];
    const double l = (end - start).norm();
    if (l > 1e-12) {
      pieces_.push_back({false, start, start, end, s, l});
      s += l;
    }
    if (i + 2 < n && half[i + 1] > 0.0) {
      const Vec2 & corner = route[i + 1];
      const Vec2 out = corner + half[i + 1] * dir[i + 1];
      const double bl = bezier_arc(end, corner, out, 1.0);
      pieces_.push_back({true, end, corner, out, s, bl});
      s += bl;
    }
  }
  total_ = s;
}

WalkPath::Point WalkPath::eval(const Piece & piece, double ds) const
{
  if (!piece.curved) {
    const Vec2 t = (piece.b - piece.a) / piece.length;
    return {piece.a + ds * t, t, 0.0};
  }
  // Invert arc length by Newton iteration on u.
  double u = std::clamp(ds / piece.length, 0.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    const double f = bezier_arc(piece.a, piece.c, piece.b, u) - ds;
    const double df = bezier_d1(piece.a, piece.c, piece.b, u).norm();
    const double next = std::clamp(u - f / df, 0.0, 1.0);
    const bool done = std::abs(next - u) < 1e-15;
    u = next;
    if (done) {
      break;
    }
  }
  const Vec2 d1 = bezier_d1(piece.a, piece.c, piece.b, u);
  const Vec2 d2 = bezier_d2(piece.a, piece.c, piece.b);
  const double speed = d1.norm();
  return {bezier(piece.a, piece.c, piece.b, u), d1 / speed, cross2(d1, d2) / (speed * speed * speed)};
}

WalkPath::Point WalkPath::at(double s) const
{
  s = std::clamp(s, 0.0, total_);
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s,
      [](double v, const Piece & p) {return v < p.s0;});
  const Piece & piece = it == pieces_.begin() ? pieces_.front() : *std::prev(it);
  return eval(piece, std::min(s - piece.s0, piece.length));
}

UnitQuaternion level_attitude(double heading)
{
  return UnitQuaternion::from_axis_angle(Vec3::UnitZ(), heading) *
         UnitQuaternion::from_axis_angle(Vec3::UnitX(), kPi);
}

TruthSample GroundTruth::at(Timestamp t) const
{
  if (samples.empty()) {
    throw Error(ErrorCode::kInsufficientData, "ground truth is empty");
  }
  if (t <= samples.front().t) {
    return samples.front();
  }
  if (t >= samples.back().t) {
    return samples.back();
  }
  auto hi = std::lower_bound(samples.begin(), samples.end(), t,
      [](const TruthSample & s, double v) {return s.t < v;});
  auto lo = std::prev(hi);
  const double w = (t - lo->t) / (hi->t - lo->t);
  TruthSample out = w < 0.5 ? *lo : *hi;
  out.t = t;
  out.p = (1 - w) * lo->p + w * hi->p;
  out.v = (1 - w) * lo->v + w * hi->v;
  out.a = (1 - w) * lo->a + w * hi->a;
  return out;
}

GroundTruth gen_walk(const Scenario & scenario)
{
  scenario.validate();
  const WalkPath path(scenario.route, scenario.corner_blend);
  GroundTruth truth;
  truth.path_length = path.length();
  truth.duration = path.length() / scenario.speed;

  auto sample = [&](double t) {
      const auto pt = path.at(scenario.speed * t);
      TruthSample s;
      s.t = t;
      s.p = Vec3(pt.p.x(), pt.p.y(), 0.0);
      s.v = scenario.speed * Vec3(pt.tangent.x(), pt.tangent.y(), 0.0);
      const Vec2 normal(-pt.tangent.y(), pt.tangent.x());
      s.a = scenario.speed * scenario.speed * pt.curvature * Vec3(normal.x(), normal.y(), 0.0);
      s.q = level_attitude(std::atan2(pt.tangent.y(), pt.tangent.x()));
      // Yaw rate about ENU up is -z in the down-pointing body frame.
      s.body_rate = Vec3(0.0, 0.0, -pt.curvature * scenario.speed);
      return s;
    };

  const auto n = static_cast<std::size_t>(std::floor(truth.duration * scenario.imu_rate + 1e-9));
  truth.samples.reserve(n + 2);
  for (std::size_t k = 0; k <= n; ++k) {
    truth.samples.push_back(sample(static_cast<double>(k) / scenario.imu_rate));
  }
  if (truth.duration - truth.samples.back().t > 1e-9) {
    truth.samples.push_back(sample(truth.duration));
  }
  return truth;
}

GroundTruth stationary_truth(const Vec3 & p, double heading, double duration, double rate)
{
  if (!(rate > 0.0) || duration < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "stationary truth needs rate > 0 and duration >= 0");
  }
  GroundTruth truth;
  truth.duration = duration;
  const auto n = static_cast<std::size_t>(std::floor(duration * rate + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    TruthSample s;
    s.t = static_cast<double>(k) / rate;
    s.p = p;
    s.q = level_attitude(heading);
    truth.samples.push_back(s);
  }
  return truth;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream)
{
  std::seed_seq seq{
    static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::vector<ImuSample> synth_imu(
  const GroundTruth & truth, const NoiseModel & noise, std::uint64_t seed, const Vec3 & gravity)
{
  auto rng = make_rng(seed, kImuStream);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto gauss = [&](double sigma) {
      const Vec3 n(unit(rng), unit(rng), unit(rng));
      return Vec3(sigma * n);
    };

  std::vector<ImuSample> out;
  out.reserve(truth.samples.size());
  for (const auto & s : truth.samples) {
    ImuSample m;
    m.t = s.t;
    m.accel = s.q.conjugate().rotate(s.a - gravity) + noise.accel_bias + gauss(noise.accel_sigma);
    m.gyro = s.body_rate + noise.gyro_bias + gauss(noise.gyro_sigma);
    out.push_back(m);
  }
  return out;
}

loc::ImuSource stationary_imu_source(
  const NoiseModel & noise, std::uint64_t seed, double rate, const Vec3 & gravity)
{
  struct State
  {
    std::mt19937_64 rng;
    std::normal_distribution<double> unit{0.0, 1.0};
    long k = 0;
  };
  auto st = std::make_shared<State>(State{make_rng(seed, kCalibrationStream)});
  const Vec3 reaction(0.0, 0.0, -gravity.norm());
  return [st, noise, rate, reaction]() {
           ImuSample m;
           m.t = static_cast<double>(st->k++) / rate;
           const Vec3 na(st->unit(st->rng), st->unit(st->rng), st->unit(st->rng));
           const Vec3 ng(st->unit(st->rng), st->unit(st->rng), st->unit(st->rng));
           m.accel = reaction + noise.accel_bias + noise.accel_sigma * na;
           m.gyro = noise.gyro_bias + noise.gyro_sigma * ng;
           return m;
         };
}

std::vector<GpsFix> synth_gps(
  const GroundTruth & truth, const GpsFix & anchor, double sigma, double rate,
  std::span<const TimeWindow> dropouts, std::uint64_t seed)
{
  if (!(rate > 0.0) || sigma < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "GPS synthesis needs rate > 0 and sigma >= 0");
  }
  const geo::LocalFrame frame(anchor);
  auto rng = make_rng(seed, kGpsStream);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<GpsFix> out;
  const auto n = static_cast<std::size_t>(std::floor(truth.duration * rate + 1e-9));
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = static_cast<double>(j) / rate;
    const double ne = unit(rng);
    const double nn = unit(rng);
    const bool dropped = std::any_of(dropouts.begin(), dropouts.end(),
        [t](const TimeWindow & w) {return w.contains(t);});
    if (dropped) {
      continue;
    }
    const Vec3 p = truth.at(t).p + Vec3(sigma * ne, sigma * nn, 0.0);
    out.push_back(frame.to_fix(geo::EnuCoord::from(p), t));
  }
  return out;
}

std::optional<double> true_range(
  const Vec3 & position, double heading, const SonarMount & mount,
  std::span<const Obstacle> obstacles, std::span<const DropOff> dropoffs,
  const SonarGeometry & geometry)
{
  const Vec2 p(position.x(), position.y());
  const double bearing = heading + mount.yaw_deg * kDeg;
  const double half = geometry.beam_half_angle_deg * kDeg;
  const bool inclined = mount.pitch_down_deg > 0.0;
  const double pitch = mount.pitch_down_deg * kDeg;
  const double footprint = inclined ? geometry.mount_height / std::tan(pitch) :
    std::numeric_limits<double>::infinity();

  double best = std::numeric_limits<double>::infinity();
  for (const auto & o : obstacles) {
    const Vec2 rel = o.center - p;
    const double d = rel.norm();
    if (d <= o.radius) {
      continue;
    }
    const double offset = std::abs(wrap_angle(std::atan2(rel.y(), rel.x()) - bearing));
    if (offset > half + std::asin(o.radius / d)) {
      continue;
    }
    const double horizontal = d - o.radius;
    if (!inclined) {
      best = std::min(best, horizontal);
    } else if (horizontal < footprint) {
      best = std::min(best, horizontal / std::cos(pitch));
    }
  }
  if (inclined) {
    const Vec2 foot = p + footprint * Vec2(std::cos(bearing), std::sin(bearing));
    double floor_drop = 0.0;
    for (const auto & d : dropoffs) {
      if (segment_distance(foot, d.a, d.b) <= 0.5 * d.width) {
        floor_drop = std::max(floor_drop, d.depth);
      }
    }
    best = std::min(best, (geometry.mount_height + floor_drop) / std::sin(pitch));
  }
  if (!(best <= geometry.max_range)) {
    return std::nullopt;
  }
  return best;
}

SonarStreams synth_sonar(
  const GroundTruth & truth, std::span<const Obstacle> obstacles,
  std::span<const DropOff> dropoffs, const SonarGeometry & geometry, double sigma,
  double rate, std::uint64_t seed)
{
  if (!(rate > 0.0) || sigma < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "sonar synthesis needs rate > 0 and sigma >= 0");
  }
  auto rng = make_rng(seed, kSonarStream);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<SonarMount> mounts = geometry.mounts;
  std::sort(mounts.begin(), mounts.end(),
    [](const SonarMount & a, const SonarMount & b) {return a.channel < b.channel;});

  SonarStreams out;
  const auto n = static_cast<std::size_t>(std::floor(truth.duration * rate + 1e-9));
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = static_cast<double>(j) / rate;
    const TruthSample pose = truth.at(t);
    const double heading = heading_of(pose.q);
    SonarCycle cycle{t, {}};
    for (const auto & m : mounts) {
      const auto r = true_range(pose.p, heading, m, obstacles, dropoffs, geometry);
      cycle.second.push_back({m.channel, r.value_or(geometry.max_range), r.has_value()});
      for (int k = 0; k < m.sensors; ++k) {
        const double measured = r.value_or(geometry.max_range) + sigma * unit(rng);
        SonarPing ping;
        ping.t = t;
        ping.channel = m.channel;
        ping.valid = r.has_value() && measured > 0.0 && measured <= geometry.max_range;
        ping.range = ping.valid ? measured : geometry.max_range;
        out.pings.push_back(ping);
      }
    }
    out.truth.push_back(std::move(cycle));
  }
  return out;
}

SimulationOutput simulate(const Scenario & scenario, bool mode_dmp, bool gps_enabled)
{
  SimulationOutput out;
  out.truth = gen_walk(scenario);
  const NoiseModel noise = mode_dmp ? scenario.noise.dmp_like() : scenario.noise;
  out.imu = synth_imu(out.truth, noise, scenario.seed);
  if (gps_enabled) {
    out.gps = synth_gps(out.truth, scenario.anchor, noise.gps_sigma, scenario.gps_rate,
        scenario.gps_dropouts, scenario.seed);
  }
  out.sonar = synth_sonar(out.truth, scenario.obstacles, scenario.dropoffs, scenario.sonar,
      noise.sonar_sigma, scenario.sonar_rate, scenario.seed);
  return out;
}

}  // namespace wearnav::sim
