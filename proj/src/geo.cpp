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

#include "wearnav/geo.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace wearnav::geo
{
namespace
{

constexpr double kDeg = std::numbers::pi / 180.0;

Mat3 ecef_to_enu_rotation(double lat_rad, double lon_rad)
{
  const double sl = std::sin(lat_rad), cl = std::cos(lat_rad);
  const double so = std::sin(lon_rad), co = std::cos(lon_rad);
  Mat3 r;
  r << -so, co, 0.0,
    -sl * co, -sl * so, cl,
    cl * co, cl * so, sl;
  return r;
}

}  // namespace

void validate_fix(const GpsFix & fix)
{
  if (!std::isfinite(fix.lat) || !std::isfinite(fix.lon) || !std::isfinite(fix.alt)) {
    throw Error(ErrorCode::kDomain, "GPS fix has non-finite fields");
  }
  if (fix.lat < -90.0 || fix.lat > 90.0) {
    throw Error(ErrorCode::kDomain, "latitude out of range: " + std::to_string(fix.lat));
  }
  if (fix.lon < -180.0 || fix.lon > 180.0) {
    throw Error(ErrorCode::kDomain, "longitude out of range: " + std::to_string(fix.lon));
  }
}

EcefCoord wgs84_to_ecef(const GpsFix & fix)
{
  validate_fix(fix);
  const double lat = fix.lat * kDeg;
  const double lon = fix.lon * kDeg;
  const double sl = std::sin(lat);
  const double cl = std::cos(lat);
  const double n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * sl * sl);
  return {
    (n + fix.alt) * cl * std::cos(lon),
    (n + fix.alt) * cl * std::sin(lon),
    (n * (1.0 - kWgs84E2) + fix.alt) * sl};
}

GpsFix ecef_to_wgs84(const EcefCoord & p)
{
  if (!all_finite(p.vec())) {
    throw Error(ErrorCode::kDomain, "ECEF coordinate is non-finite");
  }
  const double rho = std::hypot(p.x, p.y);
  const double lon = std::atan2(p.y, p.x);

  // Fixed point lat = atan2(z + e2 N sin(lat), rho); contraction factor ~e2.
  double lat = std::atan2(p.z, rho * (1.0 - kWgs84E2));
  double n = kWgs84A;
  for (int i = 0; i < 64; ++i) {
    const double sl = std::sin(lat);
    n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * sl * sl);
    const double next = std::atan2(p.z + kWgs84E2 * n * sl, rho);
    const bool done = std::abs(next - lat) < 1e-12;
    lat = next;
    if (done) {
      break;
    }
  }
  const double sl = std::sin(lat);
  const double cl = std::cos(lat);
  n = kWgs84A / std::sqrt(1.0 - kWgs84E2 * sl * sl);
  // Pick the better-conditioned height expression.
  const double h = std::abs(cl) > std::abs(sl) ?
    rho / cl - n :
    p.z / sl - n * (1.0 - kWgs84E2);

  GpsFix out;
  out.lat = lat / kDeg;
  out.lon = lon / kDeg;
  out.alt = h;
  return out;
}

EnuCoord ecef_to_enu(const EcefCoord & p, const GpsFix & ref)
{
  return LocalFrame(ref).to_enu(p);
}

EcefCoord enu_to_ecef(const EnuCoord & p, const GpsFix & ref)
{
  validate_fix(ref);
  const Vec3 origin = wgs84_to_ecef(ref).vec();
  const Vec3 x = origin + ecef_to_enu_rotation(ref.lat * kDeg, ref.lon * kDeg).transpose() * p.vec();
  return {x.x(), x.y(), x.z()};
}

LocalFrame::LocalFrame(const GpsFix & ref)
: ref_(ref),
  origin_(wgs84_to_ecef(ref).vec()),
  ecef_to_enu_(ecef_to_enu_rotation(ref.lat * kDeg, ref.lon * kDeg))
{
}

EnuCoord LocalFrame::to_enu(const GpsFix & fix) const
{
  return to_enu(wgs84_to_ecef(fix));
}

EnuCoord LocalFrame::to_enu(const EcefCoord & p) const
{
  return EnuCoord::from(ecef_to_enu_ * (p.vec() - origin_));
}

GpsFix LocalFrame::to_fix(const EnuCoord & p, Timestamp t) const
{
  const Vec3 x = origin_ + ecef_to_enu_.transpose() * p.vec();
  GpsFix fix = ecef_to_wgs84({x.x(), x.y(), x.z()});
  fix.t = t;
  return fix;
}

std::vector<WaypointCluster> cluster_waypoints(
  std::span<const GpsFix> fixes, const LocalFrame & frame,
  double cluster_radius, double min_dwell)
{
  if (!(cluster_radius > 0.0) || min_dwell < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "cluster_radius must be > 0 and min_dwell >= 0");
  }
  std::vector<WaypointCluster> out;
  std::vector<Vec3> pts;
  WaypointCluster open;
  Vec3 sum = Vec3::Zero();

  auto close = [&]() {
      if (!open.members.empty() && open.dwell() >= min_dwell) {
        open.centroid = EnuCoord::from(sum / static_cast<double>(pts.size()));
        out.push_back(std::move(open));
      }
      open = WaypointCluster{};
      pts.clear();
      sum.setZero();
    };

  double prev_t = -std::numeric_limits<double>::infinity();
  for (const auto & fix : fixes) {
    if (fix.t < prev_t) {
      throw Error(ErrorCode::kInput, "GPS fixes are not time-sorted");
    }
    prev_t = fix.t;
    const Vec3 x = frame.to_enu(fix).vec();

    bool joins = false;
    if (!pts.empty()) {
      const Vec3 centroid = sum / static_cast<double>(pts.size());
      if ((x - centroid).norm() <= cluster_radius) {
        const Vec3 updated = (sum + x) / static_cast<double>(pts.size() + 1);
        joins = true;
        for (const auto & m : pts) {
          if ((m - updated).norm() > cluster_radius) {
            joins = false;
            break;
          }
        }
      }
    }
    if (!joins) {
      close();
      open.start_t = fix.t;
    }
    open.members.push_back(fix);
    open.end_t = fix.t;
    pts.push_back(x);
    sum += x;
  }
  close();
  return out;
}

std::vector<WaypointCluster> cluster_waypoints(
  std::span<const GpsFix> fixes, double cluster_radius, double min_dwell)
{
  if (fixes.empty()) {
    return {};
  }
  return cluster_waypoints(fixes, LocalFrame(fixes.front()), cluster_radius, min_dwell);
}

GroundTruthPath label_ground_truth(std::span<const WaypointCluster> clusters, double max_gap)
{
  if (!(max_gap > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "max_gap must be > 0");
  }
  std::vector<std::size_t> best;
  for (std::size_t start = 0; start < clusters.size(); ++start) {
    std::vector<std::size_t> chain{start};
    for (std::size_t j = start + 1; j < clusters.size(); ++j) {
      const auto & last = clusters[chain.back()];
      if (clusters[j].start_t <= last.end_t) {
        continue;
      }
      if ((clusters[j].centroid.vec() - last.centroid.vec()).norm() <= max_gap) {
        chain.push_back(j);
      }
    }
    if (chain.size() > best.size()) {
      best = std::move(chain);
    }
  }
  if (best.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
            "fewer than two clusters form a chain within max_gap");
  }
  GroundTruthPath path;
  for (auto i : best) {
    const auto & c = clusters[i];
    path.points.push_back({0.5 * (c.start_t + c.end_t), c.centroid});
  }
  return path;
}

}  // namespace wearnav::geo
