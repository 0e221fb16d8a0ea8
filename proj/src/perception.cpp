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

#include "wearnav/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wearnav::perception
{
namespace
{

constexpr std::size_t idx(SonarChannel c) {return static_cast<std::size_t>(c);}
constexpr std::size_t idx(DetectionKind k) {return static_cast<std::size_t>(k);}

/// Trigger test and re-arm test for one (channel, kind) pair.
struct Rule
{
  DetectionKind kind;
  double bound;
  bool below;  ///< triggers on range <= bound, otherwise range >= bound

  bool triggers(double range) const {return below ? range <= bound : range >= bound;}
  bool rearms(double range, double fraction) const
  {
    return below ? range > bound * (1.0 + fraction) : range < bound * (1.0 - fraction);
  }
};

std::vector<Rule> rules_for(SonarChannel c, const DetectionConfig & cfg)
{
  if (is_inclined(c)) {
    return {
      {DetectionKind::kObstacle, cfg.expected_ground_range - cfg.dropoff_margin, true},
      {DetectionKind::kDropOff, cfg.expected_ground_range + cfg.dropoff_margin, false}};
  }
  return {{DetectionKind::kObstacle, cfg.threshold(c), true}};
}

}  // namespace

void DetectionConfig::validate() const
{
  for (double th : {left_threshold, right_threshold, front_threshold}) {
    if (!(th > 0.0) || th > max_range) {
      throw Error(ErrorCode::kInvalidArgument, "detection thresholds must lie in (0, max_range]");
    }
  }
  if (!(dropoff_margin > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dropoff_margin must be > 0");
  }
  if (!(expected_ground_range > dropoff_margin)) {
    throw Error(ErrorCode::kInvalidArgument, "expected_ground_range must exceed dropoff_margin");
  }
  if (rearm_fraction < 0.0 || rearm_fraction >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "rearm_fraction must be in [0, 1)");
  }
}

double DetectionConfig::threshold(SonarChannel c) const
{
  switch (c) {
    case SonarChannel::kLeft: return left_threshold;
    case SonarChannel::kRight: return right_threshold;
    case SonarChannel::kFront: return front_threshold;
    case SonarChannel::kInclinedLeft:
    case SonarChannel::kInclinedRight:
      return expected_ground_range - dropoff_margin;
  }
  return front_threshold;
}

std::string_view to_string(DetectionKind k) noexcept
{
  return k == DetectionKind::kDropOff ? "dropoff" : "obstacle";
}

DetectResult detect(
  const DetectorState & state, Timestamp t, std::span<const ChannelReading> readings,
  const DetectionConfig & cfg)
{
  DetectResult out;
  out.next = state;
  for (const auto & r : readings) {
    if (!r.valid) {
      // no echo in range: clears obstacle latches, never triggers
      for (const auto & rule : rules_for(r.channel, cfg)) {
        if (rule.below) {
          out.next.latched[idx(r.channel)][idx(rule.kind)] = false;
        }
      }
      continue;
    }
    if (!std::isfinite(r.range)) {
      continue;
    }
    for (const auto & rule : rules_for(r.channel, cfg)) {
      bool & latch = out.next.latched[idx(r.channel)][idx(rule.kind)];
      if (latch) {
        if (rule.rearms(r.range, cfg.rearm_fraction)) {
          latch = false;
        }
      } else if (rule.triggers(r.range)) {
        latch = true;
        out.events.push_back({t, r.channel, rule.kind, r.range});
      }
    }
  }
  return out;
}

Detector::Detector(DetectionConfig cfg)
: cfg_(cfg)
{
  cfg_.validate();
}

std::vector<DetectionEvent> Detector::step(Timestamp t, std::span<const ChannelReading> readings)
{
  auto res = detect(state_, t, readings, cfg_);
  state_ = res.next;
  return std::move(res.events);
}

LatencyModel LatencyModel::anchored(double anchor_pixels, double anchor_ms, double base_ms)
{
  if (!(anchor_pixels > 0.0) || !(anchor_ms > base_ms)) {
    throw Error(ErrorCode::kInvalidArgument, "latency anchor must lie above the intercept");
  }
  return {base_ms, (anchor_ms - base_ms) / anchor_pixels};
}

double latency_model(double pixels, const LatencyModel & params)
{
  if (!(pixels >= 0.0) || !std::isfinite(pixels)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel count must be >= 0");
  }
  if (!(params.per_pixel_ms > 0.0) || params.base_ms < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "latency model must be increasing with base >= 0");
  }
  return params.base_ms + params.per_pixel_ms * pixels;
}

MockRecognizer::MockRecognizer(RecognizerSpec spec)
: spec_(std::move(spec)), rng_(spec_.seed)
{
  if (spec_.label_table.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "recognizer label table is empty");
  }
  if (spec_.resolution.width <= 0 || spec_.resolution.height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "recognizer resolution must be positive");
  }
}

RecognitionResult MockRecognizer::recognize(const DetectionEvent & event)
{
  RecognitionResult r;
  r.event = event;
  r.latency_ms = latency_model(spec_.resolution.pixels(), spec_.latency);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng_) < spec_.failure_rate) {
    r.failed = true;
    return r;
  }
  std::uniform_int_distribution<std::size_t> pick(0, spec_.label_table.size() - 1);
  std::uniform_int_distribution<int> count(1, 3);
  const int n = count(rng_);
  for (int i = 0; i < n; ++i) {
    const auto & text = spec_.label_table[pick(rng_)];
    const bool dup = std::any_of(r.labels.begin(), r.labels.end(),
        [&](const Label & l) {return l.text == text;});
    if (!dup) {
      r.labels.push_back({text, 0.5 + 0.5 * unit(rng_)});
    }
  }
  std::sort(r.labels.begin(), r.labels.end(),
    [](const Label & a, const Label & b) {return a.confidence > b.confidence;});
  return r;
}

RecognitionGate::RecognitionGate(std::shared_ptr<Recognizer> recognizer)
: recognizer_(std::move(recognizer))
{
  if (!recognizer_) {
    throw Error(ErrorCode::kInvalidArgument, "recognition gate needs a recognizer");
  }
}

void RecognitionGate::start(const DetectionEvent & event, Timestamp at)
{
  RecognitionResult r;
  try {
    r = recognizer_->recognize(event);
  } catch (const std::exception &) {
    r = RecognitionResult{};
    r.event = event;
    r.failed = true;
  }
  r.labels.erase(
    std::remove_if(r.labels.begin(), r.labels.end(),
    [](const Label & l) {return !(l.confidence >= 0.0 && l.confidence <= 1.0);}),
    r.labels.end());
  r.latency_ms = std::max(0.0, r.latency_ms);
  r.started = at;
  r.completed = at + r.latency_ms / 1000.0;
  in_flight_ = std::move(r);
  ++processed_;
}

GateStatus RecognitionGate::submit(const DetectionEvent & event)
{
  ++submitted_;
  if (event.kind != DetectionKind::kObstacle) {
    return GateStatus::kNotDispatchable;
  }
  completed_ = advance(event.t);
  if (!in_flight_) {
    start(event, event.t);
    return GateStatus::kDispatched;
  }
  pending_ = event;
  return GateStatus::kBusy;
}

std::vector<RecognitionResult> RecognitionGate::advance(Timestamp now)
{
  std::vector<RecognitionResult> out = std::move(completed_);
  completed_.clear();
  while (in_flight_ && in_flight_->completed <= now) {
    const Timestamp finished = in_flight_->completed;
    out.push_back(std::move(*in_flight_));
    in_flight_.reset();
    if (pending_) {
      const DetectionEvent next = *pending_;
      pending_.reset();
      start(next, finished);
    }
  }
  return out;
}

std::vector<RecognitionResult> RecognitionGate::drain()
{
  return advance(std::numeric_limits<double>::infinity());
}

GateStatus gate_recognition(RecognitionGate & gate, const DetectionEvent & event)
{
  return gate.submit(event);
}

std::vector<Encounter> encounters_from_truth(
  std::span<const std::pair<Timestamp, std::vector<ChannelReading>>> truth,
  const DetectionConfig & cfg)
{
  struct Open
  {
    bool active = false;
    Timestamp start = 0.0;
    Timestamp last = 0.0;
  };
  std::array<std::array<Open, 2>, 5> open{};
  std::vector<Encounter> out;

  auto close = [&](SonarChannel c, DetectionKind k) {
      auto & o = open[idx(c)][idx(k)];
      if (o.active) {
        out.push_back({c, k, o.start, o.last});
        o.active = false;
      }
    };

  for (const auto & [t, readings] : truth) {
    for (const auto & r : readings) {
      for (const auto & rule : rules_for(r.channel, cfg)) {
        auto & o = open[idx(r.channel)][idx(rule.kind)];
        if (r.valid && rule.triggers(r.range)) {
          if (!o.active) {
            o.active = true;
            o.start = t;
          }
          o.last = t;
        } else {
          close(r.channel, rule.kind);
        }
      }
    }
  }
  for (auto c : kAllChannels) {
    close(c, DetectionKind::kObstacle);
    close(c, DetectionKind::kDropOff);
  }
  std::sort(out.begin(), out.end(),
    [](const Encounter & a, const Encounter & b) {return a.start < b.start;});
  return out;
}

DetectionScore score_detections(
  std::span<const DetectionEvent> events, std::span<const Encounter> encounters, double slack)
{
  DetectionScore score;
  score.encounters = encounters.size();
  score.events = events.size();
  std::vector<bool> hit(encounters.size(), false);
  for (const auto & ev : events) {
    bool matched = false;
    for (std::size_t i = 0; i < encounters.size(); ++i) {
      const auto & e = encounters[i];
      if (e.channel == ev.channel && e.kind == ev.kind &&
        ev.t >= e.start - slack && ev.t <= e.end + slack)
      {
        hit[i] = true;
        matched = true;
      }
    }
    if (!matched) {
      ++score.false_events;
    }
  }
  score.detected = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true));
  return score;
}

}  // namespace wearnav::perception
