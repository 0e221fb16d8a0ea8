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

#ifndef WEARNAV__PERCEPTION_HPP_
#define WEARNAV__PERCEPTION_HPP_

#include "wearnav/core.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace wearnav::perception
{

struct DetectionConfig
{
  double left_threshold = 1.5;
  double right_threshold = 1.5;
  double front_threshold = 2.0;
  /// Slant range from the inclined sensors to level floor.
  double expected_ground_range = 1.0 / 0.6427876096865393;  // 1 m mount, 40 deg tilt
  double dropoff_margin = 0.3;
  double max_range = 4.0;
  /// A triggered channel re-arms once its range clears the trigger bound by
  /// this fraction of the bound.
  double rearm_fraction = 0.1;

  void validate() const;
  double threshold(SonarChannel c) const;
};

enum class DetectionKind : int
{
  kObstacle = 0,
  kDropOff,
};

std::string_view to_string(DetectionKind k) noexcept;

struct DetectionEvent
{
  Timestamp t = 0.0;
  SonarChannel channel = SonarChannel::kFront;
  DetectionKind kind = DetectionKind::kObstacle;
  double range = 0.0;
};

/// One post-fusion range per channel and cycle.
struct ChannelReading
{
  SonarChannel channel = SonarChannel::kFront;
  double range = 0.0;
  bool valid = false;
};

/// Per-channel trigger latches; index by SonarChannel and DetectionKind.
struct DetectorState
{
  std::array<std::array<bool, 2>, 5> latched{};
};

struct DetectResult
{
  std::vector<DetectionEvent> events;
  DetectorState next;
};

/// One detection cycle. Left/Right/Front raise Obstacle when range <= their
/// threshold. Inclined channels raise DropOff when range >=
/// expected_ground_range + margin and Obstacle when range <=
/// expected_ground_range - margin. A latched (channel, kind) stays silent until
/// the range clears the bound by rearm_fraction of it. Invalid readings (no
/// echo) never raise events; they re-arm obstacle latches only, since nothing
/// is within range. Non-finite ranges are ignored.
DetectResult detect(
  const DetectorState & state, Timestamp t, std::span<const ChannelReading> readings,
  const DetectionConfig & cfg);

/// Stateful convenience wrapper over detect().
class Detector
{
public:
  explicit Detector(DetectionConfig cfg = {});
  std::vector<DetectionEvent> step(Timestamp t, std::span<const ChannelReading> readings);
  const DetectorState & state() const noexcept {return state_;}

private:
  DetectionConfig cfg_;
  DetectorState state_;
};

/// Affine latency in pixel count: latency_ms = base_ms + per_pixel_ms * pixels.
struct LatencyModel
{
  double base_ms = 180.0;
  double per_pixel_ms = (604.0 - 180.0) / (640.0 * 480.0);

  /// Model through (anchor_pixels, anchor_ms) with the given intercept.
  static LatencyModel anchored(double anchor_pixels, double anchor_ms, double base_ms);
};

/// Throws kInvalidArgument for pixels < 0 or a non-increasing model.
double latency_model(double pixels, const LatencyModel & params = {});

struct Resolution
{
  int width = 640;
  int height = 480;
  double pixels() const noexcept {return static_cast<double>(width) * height;}
};

struct Label
{
  std::string text;
  double confidence = 0.0;
};

struct RecognitionResult
{
  DetectionEvent event;
  std::vector<Label> labels;
  double latency_ms = 0.0;
  Timestamp started = 0.0;
  Timestamp completed = 0.0;
  bool failed = false;
};

struct RecognizerSpec
{
  Resolution resolution;
  LatencyModel latency;
  std::vector<std::string> label_table{"person", "chair", "door", "pole", "car", "bench", "stairs"};
  std::uint64_t seed = 1;
  double failure_rate = 0.0;
};

/// Pluggable frame recognizer. recognize() is called once per dispatched frame
/// and must report its modeled latency.
class Recognizer
{
public:
  virtual ~Recognizer() = default;
  virtual RecognitionResult recognize(const DetectionEvent & event) = 0;
};

/// Deterministic stand-in: labels drawn from the label table with a seeded
/// generator; latency from the latency model.
class MockRecognizer : public Recognizer
{
public:
  explicit MockRecognizer(RecognizerSpec spec);
  RecognitionResult recognize(const DetectionEvent & event) override;

private:
  RecognizerSpec spec_;
  std::mt19937_64 rng_;
};

enum class GateStatus : int
{
  kDispatched = 0,  ///< recognizer was idle; frame sent
  kBusy,            ///< recognition in flight; event kept as the pending frame
  kNotDispatchable, ///< drop-offs never go to the recognizer
};

/// Sonar-gated dispatch: at most one recognition in flight, and events that
/// arrive meanwhile collapse onto a single pending slot holding the latest one.
/// Runs in simulated time: a recognition started at t completes at
/// t + latency, and the pending event is dispatched at that instant.
class RecognitionGate
{
public:
  explicit RecognitionGate(std::shared_ptr<Recognizer> recognizer);

  GateStatus submit(const DetectionEvent & event);
  /// Completes every recognition finishing at or before `now`, in order.
  std::vector<RecognitionResult> advance(Timestamp now);
  /// Runs until nothing is in flight or pending.
  std::vector<RecognitionResult> drain();

  bool busy() const noexcept {return in_flight_.has_value();}
  std::size_t processed_frames() const noexcept {return processed_;}
  std::size_t submitted_events() const noexcept {return submitted_;}

private:
  void start(const DetectionEvent & event, Timestamp at);

  std::shared_ptr<Recognizer> recognizer_;
  std::optional<RecognitionResult> in_flight_;
  std::optional<DetectionEvent> pending_;
  /// Completions settled inside submit(), handed out by the next advance().
  std::vector<RecognitionResult> completed_;
  std::size_t processed_ = 0;
  std::size_t submitted_ = 0;
};

/// Single-shot form: dispatches to an idle gate or reports Busy.
GateStatus gate_recognition(RecognitionGate & gate, const DetectionEvent & event);

/// Ground-truth encounter: an interval in which the noiseless range of a
/// channel satisfies a trigger rule.
struct Encounter
{
  SonarChannel channel;
  DetectionKind kind;
  Timestamp start;
  Timestamp end;
};

struct DetectionScore
{
  std::size_t encounters = 0;
  std::size_t detected = 0;
  std::size_t events = 0;
  std::size_t false_events = 0;
  double recall() const noexcept
  {
    return encounters == 0 ? 1.0 : static_cast<double>(detected) / static_cast<double>(encounters);
  }
};

/// Builds encounters from per-cycle noiseless readings (one span entry per
/// cycle, all channels).
std::vector<Encounter> encounters_from_truth(
  std::span<const std::pair<Timestamp, std::vector<ChannelReading>>> truth,
  const DetectionConfig & cfg);

/// An event matches an encounter of the same channel and kind whose interval,
/// widened by `slack` seconds, contains the event time.
DetectionScore score_detections(
  std::span<const DetectionEvent> events, std::span<const Encounter> encounters, double slack);

}  // namespace wearnav::perception

#endif  // WEARNAV__PERCEPTION_HPP_
