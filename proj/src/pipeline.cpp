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

#include "wearnav/pipeline.hpp"

#include "wearnav/feedback.hpp"
#include "wearnav/geo.hpp"
#include "wearnav/perception.hpp"
#include "wearnav/sim.hpp"
#include "wearnav/sonar_ekf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <system_error>

namespace wearnav::pipeline
{
namespace fs = std::filesystem;

namespace
{

// Filter noise never drops below these, so a near-noiseless preset still
// leaves the filter some process noise to work with.
constexpr double kAccelNoiseFloor = 0.02;
constexpr double kGyroNoiseFloor = 0.002;

std::string fmt(const char * f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v == 0.0 ? 0.0 : v);
  return buf;
}

fs::path emit(CommandResult & result, const fs::path & path, std::string_view content)
{
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorCode::kIo, "cannot create directory " + path.parent_path().string());
    }
  }
  io::write_file(path, content);
  result.written.push_back(path);
  return path;
}

loc::CalibrationConfig calibration_config(const io::PipelineSettings & st)
{
  loc::CalibrationConfig cfg;
  cfg.batch = st.calib_batch;
  cfg.tol = st.calib_tol;
  cfg.max_iter = st.calib_max_iter;
  return cfg;
}

metrics::Trajectory trajectory(std::string label, std::span<const io::NavRecord> records)
{
  metrics::Trajectory out;
  out.label = std::move(label);
  out.points.reserve(records.size());
  for (const auto & r : records) {
    if (!out.points.empty() && !(r.t > out.points.back().t)) {
      continue;  // duplicate stamp from an off-grid end sample
    }
    out.points.push_back({r.t, geo::EnuCoord::from(r.p)});
  }
  return out;
}

std::string calibration_text(const loc::CalibrationResult & r)
{
  std::string out = "accel_offset";
  for (int i = 0; i < 3; ++i) {
    out += ' ' + fmt("%.6f", r.offsets.accel_offset(i));
  }
  out += "\ngyro_offset";
  for (int i = 0; i < 3; ++i) {
    out += ' ' + fmt("%.6f", r.offsets.gyro_offset(i));
  }
  out += "\niterations " + std::to_string(r.iterations) + ", batches " +
    std::to_string(r.batches) + '\n';
  return out;
}

/// Front-channel pairs grouped by timestamp.
struct FrontPair
{
  Timestamp t;
  sonar::Vec2 z;
  sonar::EchoMask valid;
};

std::vector<FrontPair> front_pairs(std::span<const SonarPing> pings)
{
  std::vector<FrontPair> out;
  std::size_t i = 0;
  while (i < pings.size()) {
    if (pings[i].channel != SonarChannel::kFront) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < pings.size() && pings[j].channel == SonarChannel::kFront && pings[j].t == pings[i].t) {
      ++j;
    }
    if (j - i != 2) {
      throw Error(ErrorCode::kUnsupportedLayout,
              "sonar fusion needs exactly two front sensors per cycle; found " +
              std::to_string(j - i) + " at t=" + fmt("%.6f", pings[i].t));
    }
    out.push_back({pings[i].t, {pings[i].range, pings[i + 1].range},
        {pings[i].valid, pings[i + 1].valid}});
    i = j;
  }
  if (out.empty()) {
    throw Error(ErrorCode::kUnsupportedLayout, "no front-channel sonar data");
  }
  return out;
}

std::string fused_csv(std::span<const FrontPair> pairs, const sonar::SonarFusionConfig & cfg)
{
  sonar::PairFuser fuser(cfg);
  std::string out = "t,raw1,raw2,fused,p11,p22\n";
  for (const auto & p : pairs) {
    const auto fused = fuser.step(p.z, p.valid);
    out += fmt("%.6f", p.t);
    for (int k = 0; k < 2; ++k) {
      out += ',';
      if (p.valid[k]) {
        out += fmt("%.6f", p.z(k));
      }
    }
    out += ',';
    if (fused) {
      const auto & s = fuser.state();
      out += fmt("%.6f", *fused) + ',' + fmt("%.9f", s.p(0, 0)) + ',' + fmt("%.9f", s.p(1, 1));
    } else {
      out += ",,";
    }
    out += '\n';
  }
  return out;
}

std::string clean(std::string text)
{
  std::replace(text.begin(), text.end(), ',', ';');
  return text;
}

}  // namespace

void RunConfig::validate() const
{
  if (scenario.empty()) {
    throw Error(ErrorCode::kUsage, "a scenario file is required");
  }
  if (!fs::exists(scenario)) {
    throw Error(ErrorCode::kUsage, "scenario file not found: " + scenario.string());
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error(ErrorCode::kUsage, "cannot create output directory " + out_dir.string());
  }
}

io::ScenarioFile resolve(const RunConfig & config)
{
  config.validate();
  auto sf = io::load_scenario(config.scenario);
  if (config.dmp) {
    sf.settings.dmp = *config.dmp;
  }
  if (config.gps) {
    sf.settings.gps = *config.gps;
  }
  if (config.seed) {
    sf.scenario.seed = *config.seed;
  }
  return sf;
}

loc::LocalizerConfig localizer_config(const io::ScenarioFile & sf)
{
  const auto & sc = sf.scenario;
  const auto noise = sf.settings.dmp ? sc.noise.dmp_like() : sc.noise;
  loc::LocalizerConfig cfg;
  cfg.accel_noise = sf.settings.filter_accel_noise.value_or(
    std::max(noise.accel_sigma, kAccelNoiseFloor));
  cfg.gyro_noise = sf.settings.filter_gyro_noise.value_or(
    std::max(noise.gyro_sigma, kGyroNoiseFloor));
  if (noise.gps_sigma > 0.0) {
    cfg.gps_pos_std = noise.gps_sigma;
  }
  cfg.imu_rate = sc.imu_rate;
  cfg.gps_rate = sc.gps_rate;
  cfg.gate = sf.settings.gps_gate;
  cfg.max_dt = std::max(cfg.max_dt, 2.0 / sc.imu_rate);
  return cfg;
}

loc::InitialConditions initial_conditions(const sim::Scenario & scenario)
{
  loc::InitialConditions init;
  init.reference = scenario.anchor;
  const sim::Vec2 start = scenario.route.front();
  init.position = Vec3(start.x(), start.y(), 0.0);
  if (scenario.route.size() >= 2) {
    const sim::Vec2 d = (scenario.route[1] - start).normalized();
    const double heading = std::atan2(d.y(), d.x());
    init.velocity = Vec3(d.x(), d.y(), 0.0) * scenario.speed;
    init.attitude = sim::level_attitude(heading);
  }
  return init;
}

CommandResult cmd_simulate(const RunConfig & config)
{
  const auto sf = resolve(config);
  const auto & sc = sf.scenario;
  const auto out = sim::simulate(sc, sf.settings.dmp, sf.settings.gps);

  CommandResult result;
  emit(result, config.out_dir / "imu.csv", io::format_imu_csv(out.imu));
  emit(result, config.out_dir / "gps.csv", io::format_gps_csv(sc.anchor, out.gps));
  emit(result, config.out_dir / "sonar.csv", io::format_sonar_csv(out.sonar.pings));
  emit(result, config.out_dir / "truth.csv", io::format_nav_csv(io::to_records(out.truth)));

  const auto noise = sf.settings.dmp ? sc.noise.dmp_like() : sc.noise;
  auto source = sim::stationary_imu_source(noise, sc.seed, sc.imu_rate);
  std::vector<ImuSample> calib(
    static_cast<std::size_t>(sf.settings.calib_max_iter + 1) *
    static_cast<std::size_t>(sf.settings.calib_batch));
  for (auto & s : calib) {
    s = source();
  }
  emit(result, config.out_dir / "calib_imu.csv", io::format_imu_csv(calib));

  result.text = "scenario '" + sc.name + "': " + fmt("%.2f", out.truth.duration) + " s, " +
    fmt("%.1f", out.truth.path_length) + " m, " + std::to_string(out.imu.size()) +
    " IMU samples, " + std::to_string(out.gps.size()) + " GPS fixes, " +
    std::to_string(out.sonar.pings.size()) + " sonar pings\n";
  return result;
}

CommandResult cmd_localize(const LocalizeOptions & options)
{
  const auto imu = io::read_imu_csv(options.imu);
  const auto gps = io::read_gps_csv(options.gps);

  loc::LocalizerConfig cfg;
  loc::InitialConditions init;
  if (options.scenario) {
    auto sf = io::load_scenario(*options.scenario);
    if (options.dmp) {
      sf.settings.dmp = *options.dmp;
    }
    cfg = localizer_config(sf);
    init = initial_conditions(sf.scenario);
  } else {
    // At rest, heading unknown.
    init.yaw_std = 3.0;
  }
  if (gps.anchor) {
    init.reference = gps.anchor;
  }
  const auto offsets = options.offsets ? io::read_offsets(*options.offsets) : loc::CalibrationOffsets{};

  const auto run = loc::run_localizer(imu, gps.fixes, cfg, offsets, init);
  CommandResult result;
  emit(result, options.out, io::format_nav_csv(io::to_records(run)));
  result.text = std::to_string(run.records.size()) + " estimates, " +
    std::to_string(run.fixes_applied) + " fixes applied, " +
    std::to_string(run.fixes_rejected) + " rejected\n";
  return result;
}

std::string format_report_csv(std::span<const metrics::ErrorReport> reports)
{
  std::string out = "label,truth_label,mean_m,peak_m,relative_percent,vertical_mean_m,path_length_m,points\n";
  for (const auto & r : reports) {
    out += clean(r.label) + ',' + clean(r.truth_label) + ',' + fmt("%.6f", r.mean) + ',' +
      fmt("%.6f", r.peak) + ',' + fmt("%.6f", r.relative_percent) + ',' +
      fmt("%.6f", r.vertical_mean) + ',' + fmt("%.6f", r.path_length) + ',' +
      std::to_string(r.n_points) + '\n';
  }
  return out;
}

CommandResult cmd_evaluate(const fs::path & est, const fs::path & truth, const fs::path & out_dir)
{
  const auto est_records = io::read_nav_csv(est);
  const auto truth_records = io::read_nav_csv(truth);
  const auto alignment = metrics::align(
    trajectory(est.stem().string(), est_records), trajectory("truth", truth_records));
  const std::vector<metrics::ErrorReport> reports{
    metrics::error_report(alignment, est.stem().string())};

  CommandResult result;
  emit(result, out_dir / "report.csv", format_report_csv(reports));
  result.text = metrics::format_table(reports);
  return result;
}

CommandResult cmd_fuse_sonar(const fs::path & sonar, const fs::path & out_dir)
{
  const auto pings = io::read_sonar_csv(sonar);
  const auto pairs = front_pairs(pings);
  CommandResult result;
  emit(result, out_dir / "fused.csv", fused_csv(pairs, {}));
  result.text = std::to_string(pairs.size()) + " fused front cycles\n";
  return result;
}

CommandResult cmd_calibrate(
  const fs::path & imu, const fs::path & out_dir, const loc::CalibrationConfig & cfg)
{
  const auto samples = io::read_imu_csv(imu);
  std::size_t next = 0;
  const loc::ImuSource source = [&]() {
      if (next == samples.size()) {
        throw Error(ErrorCode::kInsufficientData, imu.string() + ": ran out of samples after " +
                std::to_string(samples.size()) + " readings before calibration converged");
      }
      return samples[next++];
    };
  const auto r = loc::calibrate(source, cfg);
  CommandResult result;
  emit(result, out_dir / "offsets.cfg", io::format_offsets(r));
  result.text = calibration_text(r);
  return result;
}

CommandResult cmd_run(const RunConfig & config)
{
  const auto sf = resolve(config);
  const auto & sc = sf.scenario;
  const auto & st = sf.settings;
  const fs::path & dir = config.out_dir;
  CommandResult result;

  // simulate
  const auto sim_out = sim::simulate(sc, st.dmp, st.gps);
  emit(result, dir / "imu.csv", io::format_imu_csv(sim_out.imu));
  emit(result, dir / "gps.csv", io::format_gps_csv(sc.anchor, sim_out.gps));
  emit(result, dir / "sonar.csv", io::format_sonar_csv(sim_out.sonar.pings));
  const auto truth_records = io::to_records(sim_out.truth);
  emit(result, dir / "truth.csv", io::format_nav_csv(truth_records));

  // calibrate
  const auto noise = st.dmp ? sc.noise.dmp_like() : sc.noise;
  const auto calib = loc::calibrate(
    sim::stationary_imu_source(noise, sc.seed, sc.imu_rate), calibration_config(st));
  emit(result, dir / "offsets.cfg", io::format_offsets(calib));
  result.text += calibration_text(calib);

  // fuse
  const auto pairs = front_pairs(sim_out.sonar.pings);
  emit(result, dir / "fused.csv", fused_csv(pairs, {}));

  // localize
  const auto run = loc::run_localizer(sim_out.imu, sim_out.gps, localizer_config(sf),
      calib.offsets, initial_conditions(sc));
  const auto est_records = io::to_records(run);
  emit(result, dir / "est.csv", io::format_nav_csv(est_records));

  // detect and feed back
  perception::DetectionConfig dcfg;
  dcfg.left_threshold = st.side_threshold;
  dcfg.right_threshold = st.side_threshold;
  dcfg.front_threshold = st.front_threshold;
  dcfg.dropoff_margin = st.dropoff_margin;
  dcfg.max_range = sc.sonar.max_range;
  for (const auto & m : sc.sonar.mounts) {
    if (is_inclined(m.channel)) {
      dcfg.expected_ground_range = sc.sonar.ground_range(m);
    }
  }
  perception::Detector detector(dcfg);

  sonar::SonarFusionConfig fcfg;
  fcfg.q = sonar::Vec2(st.detection_q, st.detection_q).asDiagonal();
  sonar::PairFuser front(fcfg);

  perception::RecognizerSpec rspec;
  rspec.resolution = {st.camera_width, st.camera_height};
  rspec.latency = perception::LatencyModel::anchored(640.0 * 480.0, 604.0, st.latency_base_ms);
  rspec.seed = sc.seed;
  perception::RecognitionGate gate(std::make_shared<perception::MockRecognizer>(rspec));

  feedback::FeedbackConfig fb;
  fb.min_d = st.tactile_min_d;
  fb.max_d = st.tactile_max_d;
  feedback::AudioScheduler audio(st.audio_min_gap, st.audio_staleness);
  std::vector<feedback::AudioMessage> pending;

  std::string det_csv = "t,channel,kind,range\n";
  std::string rec_csv = "started,completed,latency_ms,channel,labels\n";
  std::string fb_csv = "t,kind,motor_or_priority,value\n";
  std::size_t n_events = 0;
  std::size_t n_recognitions = 0;
  std::size_t n_audio = 0;

  auto log_recognitions = [&](const std::vector<perception::RecognitionResult> & done) {
      for (const auto & r : done) {
        std::string labels;
        for (const auto & l : r.labels) {
          labels += (labels.empty() ? "" : " ") + l.text;
        }
        rec_csv += fmt("%.6f", r.started) + ',' + fmt("%.6f", r.completed) + ',' +
          fmt("%.3f", r.latency_ms) + ',' + std::string(to_string(r.event.channel)) + ',' +
          clean(labels) + '\n';
        if (!r.failed) {
          pending.push_back(feedback::announce(r));
        }
        ++n_recognitions;
      }
    };
  auto speak = [&](Timestamp t) {
      if (auto msg = audio.schedule(pending, t)) {
        fb_csv += fmt("%.6f", t) + ",audio," + std::to_string(msg->priority) + ',' +
          clean(msg->text) + '\n';
        ++n_audio;
      }
    };

  const auto & pings = sim_out.sonar.pings;
  std::size_t i = 0;
  while (i < pings.size()) {
    const Timestamp t = pings[i].t;
    std::vector<perception::ChannelReading> readings;
    std::vector<const SonarPing *> front_pings;
    for (; i < pings.size() && pings[i].t == t; ++i) {
      if (pings[i].channel == SonarChannel::kFront) {
        front_pings.push_back(&pings[i]);
      } else {
        readings.push_back({pings[i].channel, pings[i].range, pings[i].valid});
      }
    }
    if (front_pings.size() == 2) {
      const auto fused = front.step({front_pings[0]->range, front_pings[1]->range},
          {front_pings[0]->valid, front_pings[1]->valid});
      readings.push_back({SonarChannel::kFront, fused.value_or(0.0), fused.has_value()});
    } else if (front_pings.size() == 1) {
      readings.push_back({SonarChannel::kFront, front_pings[0]->range, front_pings[0]->valid});
    }

    log_recognitions(gate.advance(t));
    for (const auto & ev : detector.step(t, readings)) {
      ++n_events;
      det_csv += fmt("%.6f", ev.t) + ',' + std::string(to_string(ev.channel)) + ',' +
        std::string(perception::to_string(ev.kind)) + ',' + fmt("%.6f", ev.range) + '\n';
      const auto cmd = feedback::route_event(ev, fb);
      fb_csv += fmt("%.6f", ev.t) + ",tactile," + std::to_string(static_cast<int>(cmd.motor)) +
        ',' + fmt("%.4f", cmd.intensity) + '\n';
      pending.push_back(feedback::announce(ev));
      gate.submit(ev);
    }
    speak(t);
  }
  log_recognitions(gate.drain());

  emit(result, dir / "detections.csv", det_csv);
  emit(result, dir / "recognitions.csv", rec_csv);
  emit(result, dir / "feedback.csv", fb_csv);

  // evaluate: fused estimate against raw GPS
  std::vector<metrics::ErrorReport> reports;
  const auto truth_traj = trajectory("truth", truth_records);
  reports.push_back(metrics::error_report(
      metrics::align(trajectory("fused", est_records), truth_traj), "fused"));
  if (sim_out.gps.size() >= 2) {
    const geo::LocalFrame frame(sc.anchor);
    std::vector<io::NavRecord> gps_records;
    for (const auto & f : sim_out.gps) {
      gps_records.push_back({f.t, frame.to_enu(f).vec(), Vec3::Zero(), UnitQuaternion()});
    }
    reports.push_back(metrics::error_report(
        metrics::align(trajectory("gps_only", gps_records), truth_traj), "gps_only"));
  }
  if (reports.size() >= 2) {
    reports = metrics::compare(std::move(reports));
  }
  emit(result, dir / "report.csv", format_report_csv(reports));

  result.text += std::to_string(pairs.size()) + " fused front cycles, " +
    std::to_string(n_events) + " detections, " + std::to_string(n_recognitions) +
    " recognitions, " + std::to_string(n_audio) + " audio messages\n";
  result.text += metrics::format_table(reports);
  return result;
}

}  // namespace wearnav::pipeline
