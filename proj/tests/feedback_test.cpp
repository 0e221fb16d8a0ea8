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

#include "wearnav/feedback.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace wearnav;
using namespace wearnav::feedback;
using perception::DetectionEvent;
using perception::DetectionKind;

TEST(Intensity, SaturationAndLinearMiddle)
{
  EXPECT_EQ(intensity_map(0.2, 0.5, 2.5), 1.0);
  EXPECT_EQ(intensity_map(0.5, 0.5, 2.5), 1.0);
  EXPECT_EQ(intensity_map(-3.0, 0.5, 2.5), 1.0);
  EXPECT_EQ(intensity_map(NAN, 0.5, 2.5), 1.0);
  EXPECT_EQ(intensity_map(2.5, 0.5, 2.5), 0.0);
  EXPECT_EQ(intensity_map(9.0, 0.5, 2.5), 0.0);
  EXPECT_DOUBLE_EQ(intensity_map(1.5, 0.5, 2.5), 0.5);
  EXPECT_DOUBLE_EQ(intensity_map(1.0, 0.5, 2.5), 0.75);
}

TEST(Intensity, InverseShape)
{
  EXPECT_EQ(intensity_map_inverse(0.5, 0.5, 2.5), 1.0);
  EXPECT_EQ(intensity_map_inverse(2.5, 0.5, 2.5), 0.0);
  // 1/1 - 1/2.5 = 0.6 over 2 - 0.4 = 1.6
  EXPECT_DOUBLE_EQ(intensity_map_inverse(1.0, 0.5, 2.5), 0.6 / 1.6);
  // the inverse curve stays below the linear one inside the band
  for (double d = 0.6; d < 2.5; d += 0.1) {
    EXPECT_LT(intensity_map_inverse(d, 0.5, 2.5), intensity_map(d, 0.5, 2.5));
  }
}

TEST(Intensity, RejectsBadBand)
{
  EXPECT_THROW(intensity_map(1.0, 0.0, 2.0), Error);
  EXPECT_THROW(intensity_map(1.0, 2.0, 2.0), Error);
  EXPECT_THROW(intensity_map(1.0, 3.0, 2.0), Error);
  EXPECT_THROW(intensity_map_inverse(1.0, NAN, 2.0), Error);
}

TEST(Intensity, MonotoneNonIncreasing)
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-1.0, 4.0);
  for (int i = 0; i < 20000; ++i) {
    double a = d(rng);
    double b = d(rng);
    if (a > b) {
      std::swap(a, b);
    }
    const double ia = intensity_map(a, 0.5, 2.5);
    const double ib = intensity_map(b, 0.5, 2.5);
    ASSERT_GE(ia, ib);
    ASSERT_GE(ib, 0.0);
    ASSERT_LE(ia, 1.0);
    ASSERT_GE(intensity_map_inverse(a, 0.5, 2.5), intensity_map_inverse(b, 0.5, 2.5));
  }
}

TEST(Routing, MotorLayout)
{
  EXPECT_EQ(static_cast<int>(motor_for(SonarChannel::kLeft)), 1);
  EXPECT_EQ(static_cast<int>(motor_for(SonarChannel::kInclinedLeft)), 2);
  EXPECT_EQ(static_cast<int>(motor_for(SonarChannel::kFront)), 3);
  EXPECT_EQ(static_cast<int>(motor_for(SonarChannel::kInclinedRight)), 4);
  EXPECT_EQ(static_cast<int>(motor_for(SonarChannel::kRight)), 5);

  const DetectionEvent ev{3.0, SonarChannel::kRight, DetectionKind::kObstacle, 1.5};
  const auto cmd = route_event(ev);
  EXPECT_EQ(cmd.motor, Motor::kRight);
  EXPECT_DOUBLE_EQ(cmd.intensity, 0.5);
  EXPECT_EQ(cmd.t, 3.0);

  FeedbackConfig inv;
  inv.curve = IntensityCurve::kInverseDistance;
  EXPECT_DOUBLE_EQ(route_event(ev, inv).intensity, intensity_map_inverse(1.5, 0.5, 2.5));
}

TEST(Announce, TextAndPriority)
{
  const auto drop = announce(DetectionEvent{1.0, SonarChannel::kInclinedLeft,
    DetectionKind::kDropOff, 2.4});
  EXPECT_EQ(drop.priority, priority::kDropOff);
  EXPECT_EQ(drop.text, "drop-off ahead left");

  const auto obs = announce(DetectionEvent{2.0, SonarChannel::kFront,
    DetectionKind::kObstacle, 1.74});
  EXPECT_EQ(obs.priority, priority::kObstacle);
  EXPECT_EQ(obs.text, "obstacle ahead 1.7 meters");
  EXPECT_EQ(obs.t, 2.0);

  perception::RecognitionResult r;
  r.completed = 4.0;
  r.labels = {{"bench", 0.8}, {"chair", 0.6}};
  const auto said = announce(r);
  EXPECT_EQ(said.priority, priority::kRecognition);
  EXPECT_EQ(said.text, "bench");
  EXPECT_EQ(said.t, 4.0);
  r.failed = true;
  EXPECT_EQ(announce(r).text, "unrecognized object");
}

TEST(AudioScheduler, PriorityThenAge)
{
  AudioScheduler s(1.0);
  std::vector<AudioMessage> q{
    {priority::kNavigation, "turn left", 0.0},
    {priority::kObstacle, "obstacle b", 0.2},
    {priority::kObstacle, "obstacle a", 0.1},
    {priority::kDropOff, "drop-off", 0.3}};
  EXPECT_EQ(s.schedule(q, 0.5)->text, "drop-off");
  EXPECT_FALSE(s.schedule(q, 1.2).has_value());
  EXPECT_EQ(s.schedule(q, 1.5)->text, "obstacle a");
  EXPECT_EQ(s.schedule(q, 2.5)->text, "obstacle b");
  EXPECT_EQ(s.schedule(q, 3.5)->text, "turn left");
  EXPECT_TRUE(q.empty());
  EXPECT_EQ(*s.last_emit(), 3.5);
}

TEST(AudioScheduler, StaleMessagesDropped)
{
  AudioScheduler s(0.5, 2.0);
  std::vector<AudioMessage> q{{priority::kDropOff, "old", 0.0}, {priority::kNavigation, "new", 2.5}};
  const auto out = s.schedule(q, 3.0);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->text, "new");
  EXPECT_TRUE(q.empty());
  EXPECT_THROW(AudioScheduler(0.0), Error);
}

TEST(AudioScheduler, BurstIsRateLimited)
{
  AudioScheduler s(1.5, 100.0);
  std::vector<AudioMessage> q;
  for (int i = 0; i < 40; ++i) {
    q.push_back({priority::kObstacle, "x", 0.0});
  }
  int spoken = 0;
  for (int k = 0; k < 1000; ++k) {  // 10 s at 100 Hz
    if (s.schedule(q, 0.01 * k)) {
      ++spoken;
    }
  }
  EXPECT_LE(spoken, static_cast<int>(std::ceil(10.0 / 1.5)));
  EXPECT_GE(spoken, 6);
}
