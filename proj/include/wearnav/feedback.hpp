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

#ifndef WEARNAV__FEEDBACK_HPP_
#define WEARNAV__FEEDBACK_HPP_

#include "wearnav/core.hpp"
#include "wearnav/perception.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wearnav::feedback
{

/// Belt motors, left to right.
enum class Motor : int
{
  kLeft = 1,
  kFrontLeft = 2,
  kFront = 3,
  kFrontRight = 4,
  kRight = 5,
};

struct TactileCommand
{
  Motor motor = Motor::kFront;
  double intensity = 0.0;  ///< 0..1
  Timestamp t = 0.0;
};

/// Lower value = more urgent.
namespace priority
{
inline constexpr int kDropOff = 0;
inline constexpr int kObstacle = 1;
inline constexpr int kRecognition = 2;
inline constexpr int kNavigation = 3;
}  // namespace priority

struct AudioMessage
{
  int priority = priority::kNavigation;
  std::string text;
  Timestamp t = 0.0;
};

enum class IntensityCurve
{
  kLinear,
  kInverseDistance,
};

struct FeedbackConfig
{
  double min_d = 0.5;
  double max_d = 2.5;
  IntensityCurve curve = IntensityCurve::kLinear;
};

/// 1 at or below min_d, 0 at or beyond max_d, linear in between. Negative
/// distances behave like min_d. Throws kInvalidArgument unless 0 < min_d < max_d.
double intensity_map(double distance, double min_d, double max_d);

/// Same saturation points; 1/d shape in between, rescaled to hit 1 and 0.
double intensity_map_inverse(double distance, double min_d, double max_d);

/// Left->1, Front->3, Right->5; inclined channels drive the front-left (2)
/// and front-right (4) motors.
Motor motor_for(SonarChannel channel) noexcept;

TactileCommand route_event(const perception::DetectionEvent & event, const FeedbackConfig & cfg = {});

/// Spoken form of an event; priority follows the event kind.
AudioMessage announce(const perception::DetectionEvent & event);
AudioMessage announce(const perception::RecognitionResult & result);

/// Rate-limited, priority-ordered audio queue. Emits at most one message per
/// min_gap seconds; among pending messages the lowest priority value wins,
/// earliest timestamp breaking ties. Messages older than `staleness` seconds
/// are discarded.
class AudioScheduler
{
public:
  explicit AudioScheduler(double min_gap, double staleness = 5.0);

  /// Removes and returns the message to speak at `now`, if any. Stale entries
  /// are dropped from `pending` as a side effect.
  std::optional<AudioMessage> schedule(std::vector<AudioMessage> & pending, Timestamp now);

  std::optional<Timestamp> last_emit() const noexcept {return last_emit_;}

private:
  double min_gap_;
  double staleness_;
  std::optional<Timestamp> last_emit_;
};

}  // namespace wearnav::feedback

#endif  // WEARNAV__FEEDBACK_HPP_
