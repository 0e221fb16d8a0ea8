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

#ifndef WEARNAV__METRICS_HPP_
#define WEARNAV__METRICS_HPP_

#include "wearnav/core.hpp"
#include "wearnav/geo.hpp"

#include <span>
#include <string>
#include <vector>

namespace wearnav::metrics
{

struct TrajectoryPoint
{
  Timestamp t;
  geo::EnuCoord p;
};

struct Trajectory
{
  std::string label;
  std::vector<TrajectoryPoint> points;

  /// Throws kInput unless timestamps strictly increase and there are >= 2 points.
  void validate() const;
  /// Horizontal polyline length.
  double length() const;
};

struct PairedSample
{
  Timestamp t;
  Vec3 est;
  Vec3 truth;
  /// Horizontal ground-truth distance travelled up to t.
  double distance_travelled;
};

struct Alignment
{
  std::string truth_label;
  std::vector<PairedSample> pairs;
  std::size_t dropped = 0;  ///< estimate points outside the truth time span
  double truth_length = 0.0;
};

/// Linearly interpolates the truth at every estimate timestamp inside the
/// overlapping time span. Throws kAlignment when the spans do not overlap.
Alignment align(const Trajectory & est, const Trajectory & truth);

struct ErrorReport
{
  std::string label;
  std::string truth_label;
  std::vector<double> errors;  ///< horizontal, m
  double mean = 0.0;
  double peak = 0.0;
  /// 100 * sum(e_i) / sum(d_i), d_i the distance travelled at sample i.
  double relative_percent = 0.0;
  double vertical_mean = 0.0;  ///< informational
  double path_length = 0.0;
  std::size_t n_points = 0;
};

/// Throws kInsufficientData for no pairs and kUndefinedRelative when the
/// distance-travelled sum is zero.
ErrorReport error_report(
  std::span<const PairedSample> pairs, double truth_path_length,
  std::string label = {}, std::string truth_label = {});

ErrorReport error_report(const Alignment & alignment, std::string label = {});

/// Reports sorted by mean error, ties broken by peak. Throws kComparison with
/// fewer than two reports or mixed ground truths.
std::vector<ErrorReport> compare(std::vector<ErrorReport> reports);

/// Fixed-width table, one row per report.
std::string format_table(std::span<const ErrorReport> reports);

}  // namespace wearnav::metrics

#endif  // WEARNAV__METRICS_HPP_
