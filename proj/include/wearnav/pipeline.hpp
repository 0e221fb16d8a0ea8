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

#ifndef WEARNAV__PIPELINE_HPP_
#define WEARNAV__PIPELINE_HPP_

#include "wearnav/io.hpp"
#include "wearnav/localizer.hpp"
#include "wearnav/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wearnav::pipeline
{

/// Command-line level run options. Unset overrides fall back to the scenario file.
struct RunConfig
{
  std::filesystem::path scenario;
  std::filesystem::path out_dir = ".";
  std::optional<bool> dmp;
  std::optional<bool> gps;
  std::optional<std::uint64_t> seed;

  /// Throws kUsage when the scenario is missing or the output directory cannot
  /// be created.
  void validate() const;
};

struct CommandResult
{
  std::vector<std::filesystem::path> written;
  /// Human-readable summary for standard output.
  std::string text;
};

/// Scenario with the run overrides applied.
io::ScenarioFile resolve(const RunConfig & config);

/// imu.csv, gps.csv, sonar.csv, truth.csv and calib_imu.csv (stationary
/// readings for the calibrate command).
CommandResult cmd_simulate(const RunConfig & config);

struct LocalizeOptions
{
  std::filesystem::path imu;
  std::filesystem::path gps;
  /// Supplies initial velocity/heading, the ENU anchor and filter noise. Without
  /// it the walker starts at rest facing east and the filter uses its defaults.
  std::optional<std::filesystem::path> scenario;
  std::optional<std::filesystem::path> offsets;
  std::optional<bool> dmp;
  std::filesystem::path out = "est.csv";
};

/// Filter settings matched to a scenario's noise in the chosen mode.
loc::LocalizerConfig localizer_config(const io::ScenarioFile & sf);
loc::InitialConditions initial_conditions(const sim::Scenario & scenario);

CommandResult cmd_localize(const LocalizeOptions & options);

/// Reports `est` against `truth`; report.csv in out_dir. Throws kAlignment when
/// the time spans do not overlap.
CommandResult cmd_evaluate(
  const std::filesystem::path & est, const std::filesystem::path & truth,
  const std::filesystem::path & out_dir);

/// fused.csv with columns t,raw1,raw2,fused,p11,p22 for the front sensor pair.
/// Throws kUnsupportedLayout unless every front cycle carries two readings.
CommandResult cmd_fuse_sonar(
  const std::filesystem::path & sonar, const std::filesystem::path & out_dir);

/// Offsets from a stationary recording; offsets.cfg in out_dir.
CommandResult cmd_calibrate(
  const std::filesystem::path & imu, const std::filesystem::path & out_dir,
  const loc::CalibrationConfig & cfg = {});

/// simulate, calibrate, fuse, localize, detect, feedback log, evaluate.
CommandResult cmd_run(const RunConfig & config);

std::string format_report_csv(std::span<const metrics::ErrorReport> reports);

}  // namespace wearnav::pipeline

#endif  // WEARNAV__PIPELINE_HPP_
