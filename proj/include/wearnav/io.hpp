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

#ifndef WEARNAV__IO_HPP_
#define WEARNAV__IO_HPP_

#include "wearnav/core.hpp"
#include "wearnav/localizer.hpp"
#include "wearnav/sim.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wearnav::io
{

/// Flat `key = value` text with `#` comments. Keys may repeat.
class ConfigFile
{
public:
  struct Entry
  {
    std::string key;
    std::string value;
    int line = 0;
  };

  static ConfigFile parse(std::string_view text, std::string source);
  static ConfigFile load(const std::filesystem::path & path);

  const std::string & source() const noexcept {return source_;}
  const std::vector<Entry> & entries() const noexcept {return entries_;}
  /// Last occurrence wins.
  const Entry * find(std::string_view key) const;

  /// kParse error prefixed with "<source>:<line>: ".
  [[noreturn]] void fail(const Entry & e, const std::string & msg) const;

  double number(const Entry & e) const;
  std::vector<double> numbers(const Entry & e, std::size_t expected) const;

private:
  std::string source_;
  std::vector<Entry> entries_;
};

/// Everything besides the scenario itself that a bundled run needs.
struct PipelineSettings
{
  bool dmp = false;
  bool gps = true;
  std::optional<double> filter_accel_noise;
  std::optional<double> filter_gyro_noise;
  double gps_gate = 5.0;
  int calib_batch = 1000;
  double calib_tol = 1e-3;
  int calib_max_iter = 20;
  double front_threshold = 2.0;
  double side_threshold = 1.5;
  double dropoff_margin = 0.3;
  double tactile_min_d = 0.5;
  double tactile_max_d = 2.5;
  double audio_min_gap = 2.0;
  double audio_staleness = 5.0;
  int camera_width = 640;
  int camera_height = 480;
  double latency_base_ms = 180.0;
  double detection_q = 0.01;
};

struct ScenarioFile
{
  sim::Scenario scenario;
  PipelineSettings settings;
};

/// Throws kParse naming the file and line of the offending entry.
ScenarioFile parse_scenario(const ConfigFile & cfg);
ScenarioFile load_scenario(const std::filesystem::path & path);

struct CsvTable
{
  std::string source;
  std::vector<std::string> header;
  struct Row
  {
    int line;
    std::vector<std::string> cells;
  };
  std::vector<Row> rows;
  /// Text after '#' on comment lines, in order.
  std::vector<std::string> comments;

  double number(std::size_t row, std::size_t col) const;
  [[noreturn]] void fail(std::size_t row, std::size_t col, const std::string & msg) const;
};

/// Parses CSV text whose first non-comment line must equal `header`.
CsvTable parse_csv(std::string_view text, std::string source, std::string_view header);
CsvTable read_csv(const std::filesystem::path & path, std::string_view header);

std::string read_file(const std::filesystem::path & path);
void write_file(const std::filesystem::path & path, std::string_view content);

inline constexpr std::string_view kImuHeader = "t,ax,ay,az,gx,gy,gz";
inline constexpr std::string_view kGpsHeader = "t,lat,lon,alt";
inline constexpr std::string_view kSonarHeader = "t,channel,range,valid";
inline constexpr std::string_view kNavHeader = "t,e,n,u,ve,vn,vu,qw,qx,qy,qz";

std::string format_imu_csv(std::span<const ImuSample> samples);
std::vector<ImuSample> parse_imu_csv(const CsvTable & table);
std::vector<ImuSample> read_imu_csv(const std::filesystem::path & path);

struct GpsLog
{
  std::optional<GpsFix> anchor;
  std::vector<GpsFix> fixes;
};

/// The anchor, when given, is written as a leading `# anchor,<lat>,<lon>,<alt>` line.
std::string format_gps_csv(const std::optional<GpsFix> & anchor, std::span<const GpsFix> fixes);
GpsLog read_gps_csv(const std::filesystem::path & path);

std::string format_sonar_csv(std::span<const SonarPing> pings);
std::vector<SonarPing> read_sonar_csv(const std::filesystem::path & path);

struct NavRecord
{
  Timestamp t;
  Vec3 p;
  Vec3 v;
  UnitQuaternion q;
};

std::string format_nav_csv(std::span<const NavRecord> records);
std::vector<NavRecord> read_nav_csv(const std::filesystem::path & path);

std::vector<NavRecord> to_records(const sim::GroundTruth & truth);
std::vector<NavRecord> to_records(const loc::LocalizerRun & run);

std::string format_offsets(const loc::CalibrationResult & result);
loc::CalibrationOffsets read_offsets(const std::filesystem::path & path);

}  // namespace wearnav::io

#endif  // WEARNAV__IO_HPP_
