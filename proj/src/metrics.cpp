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

#include "wearnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace wearnav::metrics
{
namespace
{

double horizontal(const Vec3 & a, const Vec3 & b)
{
  return std::hypot(a.x() - b.x(), a.y() - b.y());
}

}  // namespace

void Trajectory::validate() const
{
  if (points.size() < 2) {
    throw Error(ErrorCode::kInput, "trajectory '" + label + "' needs at least two points");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].t > points[i - 1].t)) {
      throw Error(ErrorCode::kInput, "trajectory '" + label + "' timestamps not strictly increasing at point " +
              std::to_string(i));
    }
  }
}

double Trajectory::length() const
{
  double len = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    len += horizontal(points[i].p.vec(), points[i - 1].p.vec());
  }
  return len;
}

Alignment align(const Trajectory & est, const Trajectory & truth)
{
  est.validate();
  truth.validate();
  const double t0 = std::max(est.points.front().t, truth.points.front().t);
  const double t1 = std::min(est.points.back().t, truth.points.back().t);
  if (t0 > t1) {
    throw Error(ErrorCode::kAlignment, "estimate and truth time spans do not overlap");
  }

  // Cumulative truth distance at each truth vertex.
  std::vector<double> cum(truth.points.size(), 0.0);
  for (std::size_t i = 1; i < truth.points.size(); ++i) {
    cum[i] = cum[i - 1] + horizontal(truth.points[i].p.vec(), truth.points[i - 1].p.vec());
  }

  Alignment out;
  out.truth_label = truth.label;
  out.truth_length = cum.back();
  std::size_t j = 0;
  for (const auto & e : est.points) {
    if (e.t < t0 || e.t > t1) {
      ++out.dropped;
      continue;
    }
    while (j + 2 < truth.points.size() && truth.points[j + 1].t < e.t) {
      ++j;
    }
    const auto & a = truth.points[j];
    const auto & b = truth.points[j + 1];
    const double w = std::clamp((e.t - a.t) / (b.t - a.t), 0.0, 1.0);
    const Vec3 pa = a.p.vec();
    const Vec3 pb = b.p.vec();
    const Vec3 p = (1.0 - w) * pa + w * pb;
    out.pairs.push_back({e.t, e.p.vec(), p, cum[j] + horizontal(p, pa)});
  }
  return out;
}

ErrorReport error_report(
  std::span<const PairedSample> pairs, double truth_path_length,
  std::string label, std::string truth_label)
{
  if (pairs.empty()) {
    throw Error(ErrorCode::kInsufficientData, "error report needs at least one paired sample");
  }
  ErrorReport r;
  r.label = std::move(label);
  r.truth_label = std::move(truth_label);
  r.path_length = truth_path_length;
  r.n_points = pairs.size();
  r.errors.reserve(pairs.size());

  double err_sum = 0.0;
  double dist_sum = 0.0;
  double vert_sum = 0.0;
  for (const auto & p : pairs) {
    const double e = horizontal(p.est, p.truth);
    r.errors.push_back(e);
    err_sum += e;
    dist_sum += p.distance_travelled;
    vert_sum += std::abs(p.est.z() - p.truth.z());
    r.peak = std::max(r.peak, e);
  }
  if (!(dist_sum > 0.0)) {
    throw Error(ErrorCode::kUndefinedRelative, "relative error undefined: no distance travelled");
  }
  const double n = static_cast<double>(pairs.size());
  r.mean = err_sum / n;
  r.vertical_mean = vert_sum / n;
  r.relative_percent = 100.0 * err_sum / dist_sum;
  return r;
}

ErrorReport error_report(const Alignment & alignment, std::string label)
{
  return error_report(alignment.pairs, alignment.truth_length, std::move(label),
           alignment.truth_label);
}

std::vector<ErrorReport> compare(std::vector<ErrorReport> reports)
{
  if (reports.size() < 2) {
    throw Error(ErrorCode::kComparison, "comparison needs at least two reports");
  }
  for (const auto & r : reports) {
    if (r.truth_label != reports.front().truth_label) {
      throw Error(ErrorCode::kComparison, "reports refer to different ground truths ('" +
              r.truth_label + "' vs '" + reports.front().truth_label + "')");
    }
  }
  std::stable_sort(reports.begin(), reports.end(),
    [](const ErrorReport & a, const ErrorReport & b) {
      return a.mean != b.mean ? a.mean < b.mean : a.peak < b.peak;
    });
  return reports;
}

std::string format_table(std::span<const ErrorReport> reports)
{
  std::string out;
  char line[200];
  std::snprintf(line, sizeof(line), "%-16s %10s %10s %10s %12s %8s\n",
    "label", "mean_m", "peak_m", "rel_pct", "path_len_m", "points");
  out += line;
  for (const auto & r : reports) {
    std::snprintf(line, sizeof(line), "%-16s %10.3f %10.3f %10.2f %12.2f %8zu\n",
      r.label.c_str(), r.mean, r.peak, r.relative_percent, r.path_length, r.n_points);
    out += line;
  }
  return out;
}

}  // namespace wearnav::metrics
