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

#ifndef WEARNAV__GEO_HPP_
#define WEARNAV__GEO_HPP_

#include "wearnav/core.hpp"

#include <span>
#include <vector>

namespace wearnav::geo
{

inline constexpr double kWgs84A = 6378137.0;
inline constexpr double kWgs84F = 1.0 / 298.257223563;
inline constexpr double kWgs84B = kWgs84A * (1.0 - kWgs84F);
inline constexpr double kWgs84E2 = kWgs84F * (2.0 - kWgs84F);

struct EcefCoord
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 vec() const {return {x, y, z};}
};

struct EnuCoord
{
  double e = 0.0;
  double n = 0.0;
  double u = 0.0;

  Vec3 vec() const {return {e, n, u};}
  static EnuCoord from(const Vec3 & v) {return {v.x(), v.y(), v.z()};}
};

/// Throws kDomain when lat/lon are outside [-90, 90] / [-180, 180] or any field
/// is non-finite.
void validate_fix(const GpsFix & fix);

EcefCoord wgs84_to_ecef(const GpsFix & fix);

/// Iterative inverse; latitude refined until successive iterates agree to
/// 1e-12 rad. The returned fix has t = 0.
GpsFix ecef_to_wgs84(const EcefCoord & p);

EnuCoord ecef_to_enu(const EcefCoord & p, const GpsFix & ref);
EcefCoord enu_to_ecef(const EnuCoord & p, const GpsFix & ref);

/// Precomputed tangent plane at a reference fix. Cheaper than the free
/// functions when converting whole streams.
class LocalFrame
{
public:
  explicit LocalFrame(const GpsFix & ref);

  const GpsFix & reference() const noexcept {return ref_;}
  EnuCoord to_enu(const GpsFix & fix) const;
  EnuCoord to_enu(const EcefCoord & p) const;
  GpsFix to_fix(const EnuCoord & p, Timestamp t) const;

private:
  GpsFix ref_;
  Vec3 origin_;
  Mat3 ecef_to_enu_;
};

struct WaypointCluster
{
  std::vector<GpsFix> members;
  EnuCoord centroid;
  Timestamp start_t = 0.0;
  Timestamp end_t = 0.0;

  double dwell() const noexcept {return end_t - start_t;}
};

struct GroundTruthPath
{
  struct Point
  {
    Timestamp t;
    EnuCoord p;
  };
  std::vector<Point> points;
};

inline constexpr double kDefaultClusterRadius = 3.0;
inline constexpr double kDefaultMinDwell = 3.0;

/// Sequential running-centroid clustering. A fix joins the open cluster when
/// it lies within `cluster_radius` of the running centroid and every member
/// stays within the radius of the updated centroid; otherwise the cluster is
/// closed and a new one opened. Closed clusters shorter than `min_dwell`
/// seconds are discarded. Centroids are ENU in `frame`.
std::vector<WaypointCluster> cluster_waypoints(
  std::span<const GpsFix> fixes, const LocalFrame & frame,
  double cluster_radius = kDefaultClusterRadius, double min_dwell = kDefaultMinDwell);

/// Same, with the first fix as ENU reference.
std::vector<WaypointCluster> cluster_waypoints(
  std::span<const GpsFix> fixes,
  double cluster_radius = kDefaultClusterRadius, double min_dwell = kDefaultMinDwell);

/// Deterministic stand-in for manual labelling: the longest chain of
/// time-ordered clusters whose consecutive centroid spacing is <= max_gap
/// (earliest start wins ties). Points are stamped at mid-dwell.
/// Throws kInsufficientData when fewer than two clusters qualify.
GroundTruthPath label_ground_truth(std::span<const WaypointCluster> clusters, double max_gap);

}  // namespace wearnav::geo

#endif  // WEARNAV__GEO_HPP_
