/*
 * Copyright 2026 The wearnav Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef WEARNAV__WEARNAV_H_
#define WEARNAV__WEARNAV_H_

#include <stddef.h>
#include <stdint.h>

#if defined(WEARNAV_BUILDING_LIBRARY)
#define WN_API __attribute__((visibility("default")))
#else
#define WN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wn_status
{
  WN_OK = 0,
  WN_INVALID_ARGUMENT = 1,
  WN_INVALID_QUATERNION,
  WN_DOMAIN,
  WN_INVALID_MEASUREMENT,
  WN_USAGE,
  WN_NUMERICAL,
  WN_INSUFFICIENT_DATA,
  WN_CALIBRATION_DIVERGED,
  WN_PROPAGATION,
  WN_ALIGNMENT,
  WN_UNDEFINED_RELATIVE,
  WN_COMPARISON,
  WN_SCENARIO,
  WN_PARSE,
  WN_IO,
  WN_UNSUPPORTED_LAYOUT,
  WN_INPUT,
  WN_INTERNAL = 99
} wn_status;

WN_API const char * wn_status_string(wn_status status);
/// Message of the last failure on the calling thread; "" after success.
WN_API const char * wn_last_error(void);
/// Process exit code for a status: 0 ok, 1 usage, 2 data, 3 numerical.
WN_API int wn_status_exit_code(wn_status status);
WN_API const char * wn_version(void);

/* Geodesy */

typedef struct wn_fix
{
  double t;
  double lat;  /* deg */
  double lon;  /* deg */
  double alt;  /* m */
} wn_fix;

WN_API wn_status wn_wgs84_to_ecef(const wn_fix * fix, double ecef[3]);
WN_API wn_status wn_ecef_to_wgs84(const double ecef[3], wn_fix * fix);
WN_API wn_status wn_fix_to_enu(const wn_fix * fix, const wn_fix * reference, double enu[3]);
WN_API wn_status wn_enu_to_fix(const double enu[3], const wn_fix * reference, wn_fix * fix);

/* Two-sensor sonar fusion */

typedef struct wn_sonar_filter wn_sonar_filter;

typedef struct wn_sonar_config
{
  double r[4];  /* row-major 2x2 measurement noise */
  double q[4];  /* row-major 2x2 process noise */
  double initial_p_scale;
} wn_sonar_config;

/// Default noise: R = diag(0.09, 0.09), Q = diag(0.001, 0), P0 = I.
WN_API void wn_sonar_config_default(wn_sonar_config * cfg);
WN_API wn_status wn_sonar_filter_create(const wn_sonar_config * cfg, wn_sonar_filter ** out);
WN_API void wn_sonar_filter_destroy(wn_sonar_filter * filter);
/// One cycle. *has_output is 0 when neither sensor has an echo.
WN_API wn_status wn_sonar_filter_step(
  wn_sonar_filter * filter, double z1, int valid1, double z2, int valid2,
  double * fused, int * has_output);
/// x[2] and row-major p[4]; either may be NULL.
WN_API wn_status wn_sonar_filter_state(const wn_sonar_filter * filter, double x[2], double p[4]);

/* ES-EKF localizer */

typedef struct wn_localizer wn_localizer;

typedef struct wn_imu_sample
{
  double t;
  double accel[3];  /* m/s^2, body frame */
  double gyro[3];   /* rad/s, body frame */
} wn_imu_sample;

typedef struct wn_nav_state
{
  double t;
  double p[3];  /* ENU, m */
  double v[3];  /* ENU, m/s */
  double q[4];  /* w, x, y, z; body to ENU */
} wn_nav_state;

typedef struct wn_localizer_config
{
  double accel_noise;
  double gyro_noise;
  double gps_pos_std;
  double gate;
  double max_dt;
} wn_localizer_config;

WN_API void wn_localizer_config_default(wn_localizer_config * cfg);
/// `initial` sets position, velocity, attitude and time; `pos_std` <= 0 uses gps_pos_std.
WN_API wn_status wn_localizer_create(
  const wn_localizer_config * cfg, const wn_nav_state * initial, double pos_std,
  wn_localizer ** out);
WN_API void wn_localizer_destroy(wn_localizer * loc);
WN_API wn_status wn_localizer_propagate(wn_localizer * loc, const wn_imu_sample * imu);
/// ENU position fix; *accepted is 0 when the innovation gate rejected it.
WN_API wn_status wn_localizer_correct(wn_localizer * loc, const double enu[3], int * accepted);
WN_API wn_status wn_localizer_state(const wn_localizer * loc, wn_nav_state * out);
/// Row-major 9x9 error covariance.
WN_API wn_status wn_localizer_covariance(const wn_localizer * loc, double cov[81]);

/* Recognition gate */

typedef struct wn_gate wn_gate;

typedef enum wn_channel
{
  WN_CHANNEL_LEFT = 0,
  WN_CHANNEL_RIGHT,
  WN_CHANNEL_FRONT,
  WN_CHANNEL_INCLINED_LEFT,
  WN_CHANNEL_INCLINED_RIGHT
} wn_channel;

typedef enum wn_detection_kind
{
  WN_OBSTACLE = 0,
  WN_DROP_OFF
} wn_detection_kind;

typedef struct wn_event
{
  double t;
  wn_channel channel;
  wn_detection_kind kind;
  double range;
} wn_event;

typedef enum wn_gate_status
{
  WN_GATE_DISPATCHED = 0,
  WN_GATE_BUSY,
  WN_GATE_NOT_DISPATCHABLE
} wn_gate_status;

typedef struct wn_recognition
{
  wn_event event;
  double started;
  double completed;
  double latency_ms;
} wn_recognition;

/// Mock recognizer at the given resolution with the default latency model.
WN_API wn_status wn_gate_create(int width, int height, uint64_t seed, wn_gate ** out);
WN_API void wn_gate_destroy(wn_gate * gate);
WN_API wn_status wn_gate_submit(wn_gate * gate, const wn_event * event, wn_gate_status * status);
/// Completes recognitions up to `now`. Writes at most `capacity` results and
/// the total completed count to *count; extra results are discarded.
WN_API wn_status wn_gate_advance(
  wn_gate * gate, double now, wn_recognition * results, size_t capacity, size_t * count);
WN_API wn_status wn_gate_drain(
  wn_gate * gate, wn_recognition * results, size_t capacity, size_t * count);
WN_API size_t wn_gate_processed_frames(const wn_gate * gate);

WN_API wn_status wn_latency_ms(int width, int height, double * latency_ms);

/* Feedback */

WN_API wn_status wn_intensity_map(double distance, double min_d, double max_d, double * intensity);

typedef struct wn_audio_scheduler wn_audio_scheduler;

WN_API wn_status wn_audio_scheduler_create(
  double min_gap, double staleness, wn_audio_scheduler ** out);
WN_API void wn_audio_scheduler_destroy(wn_audio_scheduler * s);
/// Queues a message; text is copied.
WN_API wn_status wn_audio_scheduler_push(
  wn_audio_scheduler * s, int priority, const char * text, double t);
/// *emitted is 1 when a message is due at `now`; its text is copied into
/// `text` (truncated to `capacity`, always terminated) and its priority to
/// *priority. Either output may be NULL.
WN_API wn_status wn_audio_scheduler_poll(
  wn_audio_scheduler * s, double now, int * emitted, int * priority, char * text,
  size_t capacity);

/* Commands. Each writes its files and, when `summary` is non-NULL, returns a
   heap string for standard output that the caller frees with wn_text_free. */

typedef struct wn_run_options
{
  const char * scenario;
  const char * out_dir;
  int mode;      /* -1 scenario default, 0 raw, 1 dmp-like */
  int gps;       /* -1 scenario default, 0 off, 1 on */
  int has_seed;
  uint64_t seed;
} wn_run_options;

WN_API void wn_run_options_default(wn_run_options * opts);
WN_API void wn_text_free(char * text);

WN_API wn_status wn_cmd_simulate(const wn_run_options * opts, char ** summary);
WN_API wn_status wn_cmd_run(const wn_run_options * opts, char ** summary);
/// `scenario` and `offsets` may be NULL. `mode` as in wn_run_options.
WN_API wn_status wn_cmd_localize(
  const char * imu_csv, const char * gps_csv, const char * scenario, const char * offsets,
  int mode, const char * out_csv, char ** summary);
WN_API wn_status wn_cmd_evaluate(
  const char * est_csv, const char * truth_csv, const char * out_dir, char ** summary);
WN_API wn_status wn_cmd_fuse_sonar(const char * sonar_csv, const char * out_dir, char ** summary);
/// batch/max_iter <= 0 and tol <= 0 select the defaults (1000, 20, 1e-3).
WN_API wn_status wn_cmd_calibrate(
  const char * imu_csv, const char * out_dir, int batch, double tol, int max_iter,
  char ** summary);

#ifdef __cplusplus
}
#endif

#endif  // WEARNAV__WEARNAV_H_
