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

#include "wearnav/wearnav.h"

#include "wearnav/feedback.hpp"
#include "wearnav/geo.hpp"
#include "wearnav/localizer.hpp"
#include "wearnav/perception.hpp"
#include "wearnav/pipeline.hpp"
#include "wearnav/sonar_ekf.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

using namespace wearnav;

struct wn_sonar_filter
{
  sonar::PairFuser fuser;
};

struct wn_localizer
{
  loc::Localizer filter;
};

struct wn_gate
{
  perception::RecognitionGate gate;
};

struct wn_audio_scheduler
{
  feedback::AudioScheduler scheduler;
  std::vector<feedback::AudioMessage> pending;
};

namespace
{

thread_local std::string g_last_error;

wn_status fail(wn_status status, std::string msg)
{
  g_last_error = std::move(msg);
  return status;
}

/// Runs `fn`, mapping exceptions to status codes and recording the message.
template<typename Fn>
wn_status guarded(Fn && fn) noexcept
{
  try {
    g_last_error.clear();
    fn();
    return WN_OK;
  } catch (const Error & e) {
    return fail(static_cast<wn_status>(e.code()), e.what());
  } catch (const std::bad_alloc &) {
    return fail(WN_INTERNAL, "out of memory");
  } catch (const std::exception & e) {
    return fail(WN_INTERNAL, e.what());
  }
}

void require(bool ok, const char * what)
{
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument, what);
  }
}

GpsFix to_fix(const wn_fix & f)
{
  return {f.t, f.lat, f.lon, f.alt};
}

wn_fix from_fix(const GpsFix & f)
{
  return {f.t, f.lat, f.lon, f.alt};
}

wn_nav_state from_state(const loc::NominalState & s)
{
  wn_nav_state out{};
  out.t = s.t;
  for (int i = 0; i < 3; ++i) {
    out.p[i] = s.p(i);
    out.v[i] = s.v(i);
  }
  out.q[0] = s.q.w();
  out.q[1] = s.q.x();
  out.q[2] = s.q.y();
  out.q[3] = s.q.z();
  return out;
}

perception::DetectionEvent to_event(const wn_event & e)
{
  require(e.channel >= WN_CHANNEL_LEFT && e.channel <= WN_CHANNEL_INCLINED_RIGHT, "bad channel");
  require(e.kind == WN_OBSTACLE || e.kind == WN_DROP_OFF, "bad detection kind");
  return {e.t, static_cast<SonarChannel>(e.channel), static_cast<perception::DetectionKind>(e.kind),
    e.range};
}

wn_event from_event(const perception::DetectionEvent & e)
{
  return {e.t, static_cast<wn_channel>(e.channel), static_cast<wn_detection_kind>(e.kind), e.range};
}

void copy_results(
  const std::vector<perception::RecognitionResult> & done, wn_recognition * results,
  size_t capacity, size_t * count)
{
  require(results != nullptr || capacity == 0, "results is null");
  for (size_t i = 0; i < std::min(capacity, done.size()); ++i) {
    results[i] = {from_event(done[i].event), done[i].started, done[i].completed, done[i].latency_ms};
  }
  if (count) {
    *count = done.size();
  }
}

char * dup_text(const std::string & s)
{
  char * out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) {
    throw std::bad_alloc();
  }
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void deliver(const pipeline::CommandResult & r, char ** summary)
{
  if (summary) {
    *summary = dup_text(r.text);
  }
}

std::optional<bool> tri(int v)
{
  if (v < 0) {
    return std::nullopt;
  }
  return v != 0;
}

pipeline::RunConfig to_run_config(const wn_run_options * opts)
{
  require(opts != nullptr, "options are null");
  if (!opts->scenario) {
    throw Error(ErrorCode::kUsage, "a scenario file is required");
  }
  pipeline::RunConfig cfg;
  cfg.scenario = opts->scenario;
  cfg.out_dir = opts->out_dir ? opts->out_dir : ".";
  cfg.dmp = tri(opts->mode);
  cfg.gps = tri(opts->gps);
  if (opts->has_seed) {
    cfg.seed = opts->seed;
  }
  return cfg;
}

}  // namespace

extern "C" {

const char * wn_status_string(wn_status status)
{
  if (status == WN_OK) {
    return "ok";
  }
  if (status == WN_INTERNAL) {
    return "internal error";
  }
  if (status >= WN_INVALID_ARGUMENT && status <= WN_INPUT) {
    return to_string(static_cast<ErrorCode>(status)).data();
  }
  return "unknown status";
}

const char * wn_last_error(void)
{
  return g_last_error.c_str();
}

int wn_status_exit_code(wn_status status)
{
  switch (status) {
    case WN_OK:
      return 0;
    case WN_USAGE:
    case WN_INVALID_ARGUMENT:
      return 1;
    case WN_NUMERICAL:
    case WN_PROPAGATION:
    case WN_CALIBRATION_DIVERGED:
    case WN_INTERNAL:
      return 3;
    default:
      return 2;
  }
}

const char * wn_version(void)
{
  return "0.1.0";
}

wn_status wn_wgs84_to_ecef(const wn_fix * fix, double ecef[3])
{
  return guarded([&] {
             require(fix && ecef, "null argument");
             const auto p = geo::wgs84_to_ecef(to_fix(*fix));
             ecef[0] = p.x;
             ecef[1] = p.y;
             ecef[2] = p.z;
           });
}

wn_status wn_ecef_to_wgs84(const double ecef[3], wn_fix * fix)
{
  return guarded([&] {
             require(fix && ecef, "null argument");
             *fix = from_fix(geo::ecef_to_wgs84({ecef[0], ecef[1], ecef[2]}));
           });
}

wn_status wn_fix_to_enu(const wn_fix * fix, const wn_fix * reference, double enu[3])
{
  return guarded([&] {
             require(fix && reference && enu, "null argument");
             const auto p = geo::LocalFrame(to_fix(*reference)).to_enu(to_fix(*fix));
             enu[0] = p.e;
             enu[1] = p.n;
             enu[2] = p.u;
           });
}

wn_status wn_enu_to_fix(const double enu[3], const wn_fix * reference, wn_fix * fix)
{
  return guarded([&] {
             require(fix && reference && enu, "null argument");
             *fix = from_fix(geo::LocalFrame(to_fix(*reference)).to_fix({enu[0], enu[1], enu[2]}, 0.0));
           });
}

void wn_sonar_config_default(wn_sonar_config * cfg)
{
  if (!cfg) {
    return;
  }
  const sonar::SonarFusionConfig d;
  for (int i = 0; i < 4; ++i) {
    cfg->r[i] = d.r(i / 2, i % 2);
    cfg->q[i] = d.q(i / 2, i % 2);
  }
  cfg->initial_p_scale = d.initial_p_scale;
}

wn_status wn_sonar_filter_create(const wn_sonar_config * cfg, wn_sonar_filter ** out)
{
  return guarded([&] {
             require(out != nullptr, "out is null");
             sonar::SonarFusionConfig c;
             if (cfg) {
               for (int i = 0; i < 4; ++i) {
                 c.r(i / 2, i % 2) = cfg->r[i];
                 c.q(i / 2, i % 2) = cfg->q[i];
               }
               c.initial_p_scale = cfg->initial_p_scale;
             }
             c.validate();
             *out = new wn_sonar_filter{sonar::PairFuser(c)};
           });
}

void wn_sonar_filter_destroy(wn_sonar_filter * filter)
{
  delete filter;
}

wn_status wn_sonar_filter_step(
  wn_sonar_filter * filter, double z1, int valid1, double z2, int valid2,
  double * fused, int * has_output)
{
  return guarded([&] {
             require(filter != nullptr, "filter is null");
             const auto r = filter->fuser.step({z1, z2}, {valid1 != 0, valid2 != 0});
             if (fused) {
               *fused = r.value_or(0.0);
             }
             if (has_output) {
               *has_output = r.has_value() ? 1 : 0;
             }
           });
}

wn_status wn_sonar_filter_state(const wn_sonar_filter * filter, double x[2], double p[4])
{
  return guarded([&] {
             require(filter != nullptr, "filter is null");
             const auto & s = filter->fuser.state();
             if (!s.initialized) {
               throw Error(ErrorCode::kUsage, "sonar filter has not seen an echo yet");
             }
             if (x) {
               x[0] = s.x(0);
               x[1] = s.x(1);
             }
             if (p) {
               for (int i = 0; i < 4; ++i) {
                 p[i] = s.p(i / 2, i % 2);
               }
             }
           });
}

void wn_localizer_config_default(wn_localizer_config * cfg)
{
  if (!cfg) {
    return;
  }
  const loc::LocalizerConfig d;
  *cfg = {d.accel_noise, d.gyro_noise, d.gps_pos_std, d.gate, d.max_dt};
}

wn_status wn_localizer_create(
  const wn_localizer_config * cfg, const wn_nav_state * initial, double pos_std,
  wn_localizer ** out)
{
  return guarded([&] {
             require(out && initial, "null argument");
             loc::LocalizerConfig c;
             if (cfg) {
               c.accel_noise = cfg->accel_noise;
               c.gyro_noise = cfg->gyro_noise;
               c.gps_pos_std = cfg->gps_pos_std;
               c.gate = cfg->gate;
               c.max_dt = cfg->max_dt;
             }
             c.validate();
             loc::NominalState s;
             s.t = initial->t;
             s.p = Vec3(initial->p[0], initial->p[1], initial->p[2]);
             s.v = Vec3(initial->v[0], initial->v[1], initial->v[2]);
             s.q = UnitQuaternion::from_components(initial->q[0], initial->q[1], initial->q[2],
             initial->q[3]);
             loc::InitialConditions init;
             if (pos_std > 0.0) {
               init.pos_std = pos_std;
             }
             *out = new wn_localizer{loc::Localizer(c, s, loc::initial_covariance(init, c))};
           });
}

void wn_localizer_destroy(wn_localizer * loc)
{
  delete loc;
}

wn_status wn_localizer_propagate(wn_localizer * loc, const wn_imu_sample * imu)
{
  return guarded([&] {
             require(loc && imu, "null argument");
             ImuSample s;
             s.t = imu->t;
             s.accel = Vec3(imu->accel[0], imu->accel[1], imu->accel[2]);
             s.gyro = Vec3(imu->gyro[0], imu->gyro[1], imu->gyro[2]);
             loc->filter.propagate_to(s);
           });
}

wn_status wn_localizer_correct(wn_localizer * loc, const double enu[3], int * accepted)
{
  return guarded([&] {
             require(loc && enu, "null argument");
             const auto r = loc->filter.correct({enu[0], enu[1], enu[2]});
             if (accepted) {
               *accepted = r.accepted ? 1 : 0;
             }
           });
}

wn_status wn_localizer_state(const wn_localizer * loc, wn_nav_state * out)
{
  return guarded([&] {
             require(loc && out, "null argument");
             *out = from_state(loc->filter.state());
           });
}

wn_status wn_localizer_covariance(const wn_localizer * loc, double cov[81])
{
  return guarded([&] {
             require(loc && cov, "null argument");
             const auto & p = loc->filter.covariance();
             for (int i = 0; i < 81; ++i) {
               cov[i] = p(i / 9, i % 9);
             }
           });
}

wn_status wn_gate_create(int width, int height, uint64_t seed, wn_gate ** out)
{
  return guarded([&] {
             require(out != nullptr, "out is null");
             require(width > 0 && height > 0, "resolution must be positive");
             perception::RecognizerSpec spec;
             spec.resolution = {width, height};
             spec.seed = seed;
             *out = new wn_gate{perception::RecognitionGate(
                 std::make_shared<perception::MockRecognizer>(spec))};
           });
}

void wn_gate_destroy(wn_gate * gate)
{
  delete gate;
}

wn_status wn_gate_submit(wn_gate * gate, const wn_event * event, wn_gate_status * status)
{
  return guarded([&] {
             require(gate && event, "null argument");
             const auto s = gate->gate.submit(to_event(*event));
             if (status) {
               *status = static_cast<wn_gate_status>(s);
             }
           });
}

wn_status wn_gate_advance(
  wn_gate * gate, double now, wn_recognition * results, size_t capacity, size_t * count)
{
  return guarded([&] {
             require(gate != nullptr, "gate is null");
             copy_results(gate->gate.advance(now), results, capacity, count);
           });
}

wn_status wn_gate_drain(wn_gate * gate, wn_recognition * results, size_t capacity, size_t * count)
{
  return guarded([&] {
             require(gate != nullptr, "gate is null");
             copy_results(gate->gate.drain(), results, capacity, count);
           });
}

size_t wn_gate_processed_frames(const wn_gate * gate)
{
  return gate ? gate->gate.processed_frames() : 0;
}

wn_status wn_latency_ms(int width, int height, double * latency_ms)
{
  return guarded([&] {
             require(latency_ms != nullptr, "latency_ms is null");
             require(width >= 0 && height >= 0, "resolution must be non-negative");
             *latency_ms = perception::latency_model(perception::Resolution{width, height}.pixels());
           });
}

wn_status wn_intensity_map(double distance, double min_d, double max_d, double * intensity)
{
  return guarded([&] {
             require(intensity != nullptr, "intensity is null");
             *intensity = feedback::intensity_map(distance, min_d, max_d);
           });
}

wn_status wn_audio_scheduler_create(double min_gap, double staleness, wn_audio_scheduler ** out)
{
  return guarded([&] {
             require(out != nullptr, "out is null");
             *out = new wn_audio_scheduler{feedback::AudioScheduler(min_gap, staleness), {}};
           });
}

void wn_audio_scheduler_destroy(wn_audio_scheduler * s)
{
  delete s;
}

wn_status wn_audio_scheduler_push(wn_audio_scheduler * s, int priority, const char * text, double t)
{
  return guarded([&] {
             require(s && text, "null argument");
             s->pending.push_back({priority, text, t});
           });
}

wn_status wn_audio_scheduler_poll(
  wn_audio_scheduler * s, double now, int * emitted, int * priority, char * text,
  size_t capacity)
{
  return guarded([&] {
             require(s != nullptr, "scheduler is null");
             const auto msg = s->scheduler.schedule(s->pending, now);
             if (emitted) {
               *emitted = msg ? 1 : 0;
             }
             if (!msg) {
               return;
             }
             if (priority) {
               *priority = msg->priority;
             }
             if (text && capacity > 0) {
               const size_t n = std::min(capacity - 1, msg->text.size());
               std::memcpy(text, msg->text.data(), n);
               text[n] = '\0';
             }
           });
}

void wn_run_options_default(wn_run_options * opts)
{
  if (opts) {
    *opts = {nullptr, ".", -1, -1, 0, 0};
  }
}

void wn_text_free(char * text)
{
  std::free(text);
}

wn_status wn_cmd_simulate(const wn_run_options * opts, char ** summary)
{
  return guarded([&] {deliver(pipeline::cmd_simulate(to_run_config(opts)), summary);});
}

wn_status wn_cmd_run(const wn_run_options * opts, char ** summary)
{
  return guarded([&] {deliver(pipeline::cmd_run(to_run_config(opts)), summary);});
}

wn_status wn_cmd_localize(
  const char * imu_csv, const char * gps_csv, const char * scenario, const char * offsets,
  int mode, const char * out_csv, char ** summary)
{
  return guarded([&] {
             if (!imu_csv || !gps_csv || !out_csv) {
               throw Error(ErrorCode::kUsage, "localize needs IMU, GPS and output paths");
             }
             pipeline::LocalizeOptions o;
             o.imu = imu_csv;
             o.gps = gps_csv;
             if (scenario) {
               o.scenario = scenario;
             }
             if (offsets) {
               o.offsets = offsets;
             }
             o.dmp = tri(mode);
             o.out = out_csv;
             deliver(pipeline::cmd_localize(o), summary);
           });
}

wn_status wn_cmd_evaluate(
  const char * est_csv, const char * truth_csv, const char * out_dir, char ** summary)
{
  return guarded([&] {
             if (!est_csv || !truth_csv) {
               throw Error(ErrorCode::kUsage, "evaluate needs estimate and truth paths");
             }
             deliver(pipeline::cmd_evaluate(est_csv, truth_csv, out_dir ? out_dir : "."), summary);
           });
}

wn_status wn_cmd_fuse_sonar(const char * sonar_csv, const char * out_dir, char ** summary)
{
  return guarded([&] {
             if (!sonar_csv) {
               throw Error(ErrorCode::kUsage, "fuse-sonar needs a sonar path");
             }
             deliver(pipeline::cmd_fuse_sonar(sonar_csv, out_dir ? out_dir : "."), summary);
           });
}

wn_status wn_cmd_calibrate(
  const char * imu_csv, const char * out_dir, int batch, double tol, int max_iter,
  char ** summary)
{
  return guarded([&] {
             if (!imu_csv) {
               throw Error(ErrorCode::kUsage, "calibrate needs an IMU path");
             }
             loc::CalibrationConfig cfg;
             if (batch > 0) {
               cfg.batch = batch;
             }
             if (tol > 0.0) {
               cfg.tol = tol;
             }
             if (max_iter > 0) {
               cfg.max_iter = max_iter;
             }
             deliver(pipeline::cmd_calibrate(imu_csv, out_dir ? out_dir : ".", cfg), summary);
           });
}

}  // extern "C"
