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

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wearnav;
using namespace wearnav::metrics;

namespace
{

Trajectory line(std::string label, double t0, double t1, double dt, double vx, double offset_n = 0.0)
{
  Trajectory tr;
  tr.label = std::move(label);
  for (double t = t0; t <= t1 + 1e-9; t += dt) {
    tr.points.push_back({t, {vx * t, offset_n, 0.0}});
  }
  return tr;
}

ErrorCode code_of(const std::function<void()> & fn)
{
  try {
    fn();
  } catch (const Error & e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST(Metrics, HandComputedReport)
{
  // errors 3, 4 (3-4-5 rule: 0, then 5), travelled 1, 2, 3
  const std::vector<PairedSample> pairs{
    {0.0, Vec3(3, 0, 1), Vec3(0, 0, 0), 1.0},
    {1.0, Vec3(0, 4, -1), Vec3(0, 0, 0), 2.0},
    {2.0, Vec3(3, 4, 0), Vec3(0, 0, 0), 3.0}};
  const auto r = error_report(pairs, 10.0, "est", "gt");
  EXPECT_DOUBLE_EQ(r.mean, 4.0);
  EXPECT_DOUBLE_EQ(r.peak, 5.0);
  EXPECT_DOUBLE_EQ(r.relative_percent, 200.0);
  EXPECT_DOUBLE_EQ(r.vertical_mean, 2.0 / 3.0);
  EXPECT_EQ(r.n_points, 3u);
  EXPECT_EQ(r.path_length, 10.0);
  EXPECT_EQ(r.label, "est");
}

TEST(Metrics, MatchesOracleOnRandomPairs)
{
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PairedSample> pairs;
    std::vector<std::array<double, 2>> est;
    std::vector<std::array<double, 2>> truth;
    std::vector<double> travelled;
    double d = 0.0;
    for (int i = 0; i < 1000; ++i) {
      d += std::abs(u(rng)) * 0.01;
      const Vec3 e(u(rng), u(rng), u(rng));
      const Vec3 g(u(rng), u(rng), u(rng));
      pairs.push_back({i * 0.1, e, g, d});
      est.push_back({e.x(), e.y()});
      truth.push_back({g.x(), g.y()});
      travelled.push_back(d);
    }
    const auto r = error_report(pairs, d);
    const auto ref = oracle::error_stats(est, truth, travelled);
    ASSERT_NEAR(r.mean, ref.mean, 1e-12 * ref.mean);
    ASSERT_EQ(r.peak, ref.peak);
    ASSERT_NEAR(r.relative_percent, ref.relative_percent, 1e-12 * ref.relative_percent);
    ASSERT_LE(r.mean, r.peak);
  }
}

TEST(Metrics, AlignInterpolatesTruth)
{
  const auto truth = line("gt", 0.0, 10.0, 1.0, 2.0);
  auto est = line("est", 0.5, 12.5, 1.0, 2.0, 1.0);
  est.points.insert(est.points.begin(), TrajectoryPoint{-1.0, {0, 0, 0}});
  const auto a = align(est, truth);
  EXPECT_EQ(a.truth_label, "gt");
  EXPECT_DOUBLE_EQ(a.truth_length, 20.0);
  // -1.0 and 10.5 .. 12.5 fall outside
  EXPECT_EQ(a.dropped, 4u);
  ASSERT_EQ(a.pairs.size(), 10u);
  for (const auto & p : a.pairs) {
    EXPECT_NEAR(p.truth.x(), 2.0 * p.t, 1e-12);
    EXPECT_NEAR(p.distance_travelled, 2.0 * p.t, 1e-12);
  }
  const auto r = error_report(a, "est");
  EXPECT_NEAR(r.mean, 1.0, 1e-12);
  EXPECT_NEAR(r.peak, 1.0, 1e-12);
  EXPECT_NEAR(r.relative_percent, 100.0 * 10.0 / (2.0 * 50.0), 1e-9);
}

TEST(Metrics, ErrorCodes)
{
  const auto truth = line("gt", 0.0, 5.0, 1.0, 1.0);
  EXPECT_EQ(code_of([&] {align(line("e", 10.0, 12.0, 1.0, 1.0), truth);}), ErrorCode::kAlignment);
  EXPECT_EQ(code_of([&] {error_report(std::vector<PairedSample>{}, 1.0);}),
    ErrorCode::kInsufficientData);
  const std::vector<PairedSample> still{{0.0, Vec3::Zero(), Vec3::Zero(), 0.0}};
  EXPECT_EQ(code_of([&] {error_report(still, 0.0);}), ErrorCode::kUndefinedRelative);

  Trajectory bad = truth;
  bad.points[3].t = bad.points[2].t;
  EXPECT_EQ(code_of([&] {bad.validate();}), ErrorCode::kInput);
  Trajectory one;
  one.points.push_back({0.0, {}});
  EXPECT_EQ(code_of([&] {one.validate();}), ErrorCode::kInput);
}

TEST(Metrics, CompareSortsAndChecksTruth)
{
  ErrorReport a;
  a.label = "a";
  a.truth_label = "gt";
  a.mean = 2.0;
  a.peak = 5.0;
  ErrorReport b = a;
  b.label = "b";
  b.peak = 3.0;
  ErrorReport c = a;
  c.label = "c";
  c.mean = 1.0;
  const auto sorted = compare({a, b, c});
  EXPECT_EQ(sorted[0].label, "c");
  EXPECT_EQ(sorted[1].label, "b");
  EXPECT_EQ(sorted[2].label, "a");

  EXPECT_EQ(code_of([&] {compare({a});}), ErrorCode::kComparison);
  ErrorReport other = a;
  other.truth_label = "other";
  EXPECT_EQ(code_of([&] {compare({a, other});}), ErrorCode::kComparison);

  const auto table = format_table(sorted);
  EXPECT_NE(table.find("mean_m"), std::string::npos);
  EXPECT_NE(table.find("c "), std::string::npos);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
}

TEST(Metrics, TrajectoryLengthIsHorizontal)
{
  Trajectory tr;
  tr.points = {{0.0, {0, 0, 0}}, {1.0, {3, 4, 100}}, {2.0, {3, 4, 0}}};
  EXPECT_DOUBLE_EQ(tr.length(), 5.0);
}
