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

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace wearnav::feedback
{
namespace
{

void check_band(double min_d, double max_d)
{
  if (!(min_d > 0.0) || !(max_d > min_d)) {
    throw Error(ErrorCode::kInvalidArgument, "intensity band needs 0 < min_d < max_d");
  }
}

std::string side_name(SonarChannel c)
{
  switch (c) {
    case SonarChannel::kLeft: return "left";
    case SonarChannel::kRight: return "right";
    case SonarChannel::kFront: return "ahead";
    case SonarChannel::kInclinedLeft: return "ahead left";
    case SonarChannel::kInclinedRight: return "ahead right";
  }
  return "ahead";
}

}  // namespace

double intensity_map(double distance, double min_d, double max_d)
{
  check_band(min_d, max_d);
  if (std::isnan(distance) || distance <= min_d) {
    return 1.0;
  }
  if (distance >= max_d) {
    return 0.0;
  }
  return (max_d - distance) / (max_d - min_d);
}

double intensity_map_inverse(double distance, double min_d, double max_d)
{
  check_band(min_d, max_d);
  if (std::isnan(distance) || distance <= min_d) {
    return 1.0;
  }
  if (distance >= max_d) {
    return 0.0;
  }
  return (1.0 / distance - 1.0 / max_d) / (1.0 / min_d - 1.0 / max_d);
}

Motor motor_for(SonarChannel channel) noexcept
{
  switch (channel) {
    case SonarChannel::kLeft: return Motor::kLeft;
    case SonarChannel::kRight: return Motor::kRight;
    case SonarChannel::kFront: return Motor::kFront;
    case SonarChannel::kInclinedLeft: return Motor::kFrontLeft;
    case SonarChannel::kInclinedRight: return Motor::kFrontRight;
  }
  return Motor::kFront;
}

TactileCommand route_event(const perception::DetectionEvent & event, const FeedbackConfig & cfg)
{
  TactileCommand cmd;
  cmd.motor = motor_for(event.channel);
  cmd.t = event.t;
  cmd.intensity = cfg.curve == IntensityCurve::kInverseDistance ?
    intensity_map_inverse(event.range, cfg.min_d, cfg.max_d) :
    intensity_map(event.range, cfg.min_d, cfg.max_d);
  return cmd;
}

AudioMessage announce(const perception::DetectionEvent & event)
{
  char buf[96];
  AudioMessage msg;
  msg.t = event.t;
  if (event.kind == perception::DetectionKind::kDropOff) {
    msg.priority = priority::kDropOff;
    std::snprintf(buf, sizeof(buf), "drop-off %s", side_name(event.channel).c_str());
  } else {
    msg.priority = priority::kObstacle;
    std::snprintf(buf, sizeof(buf), "obstacle %s %.1f meters",
      side_name(event.channel).c_str(), event.range);
  }
  msg.text = buf;
  return msg;
}

AudioMessage announce(const perception::RecognitionResult & result)
{
  AudioMessage msg;
  msg.priority = priority::kRecognition;
  msg.t = result.completed;
  if (result.failed || result.labels.empty()) {
    msg.text = "unrecognized object";
  } else {
    msg.text = result.labels.front().text;
  }
  return msg;
}

AudioScheduler::AudioScheduler(double min_gap, double staleness)
: min_gap_(min_gap), staleness_(staleness)
{
  if (!(min_gap > 0.0) || !(staleness > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "audio min_gap and staleness must be > 0");
  }
}

std::optional<AudioMessage> AudioScheduler::schedule(
  std::vector<AudioMessage> & pending, Timestamp now)
{
  std::erase_if(pending, [&](const AudioMessage & m) {return now - m.t > staleness_;});
  if (pending.empty()) {
    return std::nullopt;
  }
  if (last_emit_ && now - *last_emit_ < min_gap_) {
    return std::nullopt;
  }
  auto best = std::min_element(pending.begin(), pending.end(),
      [](const AudioMessage & a, const AudioMessage & b) {
        return a.priority != b.priority ? a.priority < b.priority : a.t < b.t;
      });
  AudioMessage out = std::move(*best);
  pending.erase(best);
  last_emit_ = now;
  return out;
}

}  // namespace wearnav::feedback
