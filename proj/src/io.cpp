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

#include "wearnav/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wearnav::io
{
namespace
{

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) {
      return out;
    }
    start = pos + 1;
  }
}

std::optional<double> to_double(std::string_view s)
{
  s = trim(s);
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

/// Whitespace- or comma-separated numbers.
std::optional<std::vector<double>> to_numbers(std::string_view s)
{
  std::vector<double> out;
  std::string buf(s);
  std::replace(buf.begin(), buf.end(), ',', ' ');
  std::istringstream in(buf);
  std::string tok;
  while (in >> tok) {
    auto v = to_double(tok);
    if (!v) {
      return std::nullopt;
    }
    out.push_back(*v);
  }
  return out;
}

void put(std::string & out, double v, int precision)
{
  char buf[64];
  if (v == 0.0) {
    v = 0.0;  // no "-0.000"
  }
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  out += buf;
}

void check_sorted(const CsvTable & table, const std::vector<double> & times)
{
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) {
      throw Error(ErrorCode::kInput, table.source + ": row " + std::to_string(table.rows[i].line) +
              ", column 't': timestamp " + std::to_string(times[i]) +
              " is earlier than the previous row");
    }
  }
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, std::string source)
{
  ConfigFile cfg;
  cfg.source_ = std::move(source);
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) {
      line = trim(line.substr(0, hash));
    }
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse, cfg.source_ + ":" + std::to_string(line_no) +
              ": expected 'key = value'");
    }
    Entry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
    if (e.key.empty()) {
      throw Error(ErrorCode::kParse, cfg.source_ + ":" + std::to_string(line_no) + ": empty key");
    }
    cfg.entries_.push_back(std::move(e));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path & path)
{
  return parse(read_file(path), path.string());
}

const ConfigFile::Entry * ConfigFile::find(std::string_view key) const
{
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) {
      return &*it;
    }
  }
  return nullptr;
}

void ConfigFile::fail(const Entry & e, const std::string & msg) const
{
  throw Error(ErrorCode::kParse, source_ + ":" + std::to_string(e.line) + ": " + e.key + ": " + msg);
}

double ConfigFile::number(const Entry & e) const
{
  auto v = to_double(e.value);
  if (!v) {
    fail(e, "expected a number, got '" + e.value + "'");
  }
  return *v;
}

std::vector<double> ConfigFile::numbers(const Entry & e, std::size_t expected) const
{
  auto v = to_numbers(e.value);
  if (!v || v->size() != expected) {
    fail(e, "expected " + std::to_string(expected) + " numbers, got '" + e.value + "'");
  }
  return *v;
}

ScenarioFile parse_scenario(const ConfigFile & cfg)
{
  ScenarioFile out;
  auto & sc = out.scenario;
  auto & st = out.settings;

  auto vec3 = [&](const ConfigFile::Entry & e) {
      const auto v = cfg.numbers(e, 3);
      return Vec3(v[0], v[1], v[2]);
    };
  auto on_off = [&](const ConfigFile::Entry & e) {
      if (e.value == "on") {return true;}
      if (e.value == "off") {return false;}
      cfg.fail(e, "expected on|off");
    };
  auto positive_int = [&](const ConfigFile::Entry & e) {
      const double v = cfg.number(e);
      if (v < 1 || v != std::floor(v)) {
        cfg.fail(e, "expected a positive integer");
      }
      return static_cast<int>(v);
    };

  for (const auto & e : cfg.entries()) {
    const auto & k = e.key;
    if (k == "name") {
      sc.name = e.value;
    } else if (k == "seed") {
      const double v = cfg.number(e);
      if (v < 0 || v != std::floor(v)) {
        cfg.fail(e, "expected a non-negative integer");
      }
      sc.seed = static_cast<std::uint64_t>(v);
    } else if (k == "speed") {
      sc.speed = cfg.number(e);
    } else if (k == "imu_rate") {
      sc.imu_rate = cfg.number(e);
    } else if (k == "gps_rate") {
      sc.gps_rate = cfg.number(e);
    } else if (k == "sonar_rate") {
      sc.sonar_rate = cfg.number(e);
    } else if (k == "corner_blend") {
      sc.corner_blend = cfg.number(e);
    } else if (k == "anchor") {
      const auto v = cfg.numbers(e, 3);
      sc.anchor = GpsFix{0.0, v[0], v[1], v[2]};
    } else if (k == "route") {
      sc.route.clear();
      for (auto wp : split(e.value, ';')) {
        auto v = to_numbers(wp);
        if (!v || v->size() != 2) {
          cfg.fail(e, "waypoints must be 'east north' pairs separated by ';'");
        }
        sc.route.emplace_back((*v)[0], (*v)[1]);
      }
    } else if (k == "accel_sigma") {
      sc.noise.accel_sigma = cfg.number(e);
    } else if (k == "gyro_sigma") {
      sc.noise.gyro_sigma = cfg.number(e);
    } else if (k == "accel_bias") {
      sc.noise.accel_bias = vec3(e);
    } else if (k == "gyro_bias") {
      sc.noise.gyro_bias = vec3(e);
    } else if (k == "gps_sigma") {
      sc.noise.gps_sigma = cfg.number(e);
    } else if (k == "sonar_sigma") {
      sc.noise.sonar_sigma = cfg.number(e);
    } else if (k == "obstacle") {
      const auto v = cfg.numbers(e, 3);
      sc.obstacles.push_back({sim::Vec2(v[0], v[1]), v[2]});
    } else if (k == "dropoff") {
      const auto v = cfg.numbers(e, 6);
      sc.dropoffs.push_back({sim::Vec2(v[0], v[1]), sim::Vec2(v[2], v[3]), v[4], v[5]});
    } else if (k == "gps_dropout") {
      const auto v = cfg.numbers(e, 2);
      sc.gps_dropouts.push_back({v[0], v[1]});
    } else if (k == "front_sensors") {
      sc.sonar.mounts[2].sensors = positive_int(e);
    } else if (k == "sonar_max_range") {
      sc.sonar.max_range = cfg.number(e);
    } else if (k == "mode") {
      if (e.value != "raw" && e.value != "dmp") {
        cfg.fail(e, "expected raw|dmp");
      }
      st.dmp = e.value == "dmp";
    } else if (k == "gps") {
      st.gps = on_off(e);
    } else if (k == "filter_accel_noise") {
      st.filter_accel_noise = cfg.number(e);
    } else if (k == "filter_gyro_noise") {
      st.filter_gyro_noise = cfg.number(e);
    } else if (k == "gps_gate") {
      st.gps_gate = cfg.number(e);
    } else if (k == "calib_batch") {
      st.calib_batch = positive_int(e);
    } else if (k == "calib_tol") {
      st.calib_tol = cfg.number(e);
    } else if (k == "calib_max_iter") {
      st.calib_max_iter = positive_int(e);
    } else if (k == "front_threshold") {
      st.front_threshold = cfg.number(e);
    } else if (k == "side_threshold") {
      st.side_threshold = cfg.number(e);
    } else if (k == "dropoff_margin") {
      st.dropoff_margin = cfg.number(e);
    } else if (k == "tactile_min_d") {
      st.tactile_min_d = cfg.number(e);
    } else if (k == "tactile_max_d") {
      st.tactile_max_d = cfg.number(e);
    } else if (k == "audio_min_gap") {
      st.audio_min_gap = cfg.number(e);
    } else if (k == "audio_staleness") {
      st.audio_staleness = cfg.number(e);
    } else if (k == "camera_resolution") {
      const auto v = cfg.numbers(e, 2);
      st.camera_width = static_cast<int>(v[0]);
      st.camera_height = static_cast<int>(v[1]);
    } else if (k == "latency_base_ms") {
      st.latency_base_ms = cfg.number(e);
    } else if (k == "detection_q") {
      st.detection_q = cfg.number(e);
    } else {
      cfg.fail(e, "unknown key");
    }
  }
  if (sc.route.empty()) {
    throw Error(ErrorCode::kParse, cfg.source() + ": missing required key 'route'");
  }
  try {
    sc.validate();
  } catch (const Error & err) {
    throw Error(ErrorCode::kParse, cfg.source() + ": " + err.what());
  }
  return out;
}

ScenarioFile load_scenario(const std::filesystem::path & path)
{
  return parse_scenario(ConfigFile::load(path));
}

double CsvTable::number(std::size_t row, std::size_t col) const
{
  auto v = to_double(rows[row].cells[col]);
  if (!v) {
    fail(row, col, "expected a number, got '" + rows[row].cells[col] + "'");
  }
  return *v;
}

void CsvTable::fail(std::size_t row, std::size_t col, const std::string & msg) const
{
  const std::string column = col < header.size() ? header[col] : std::to_string(col + 1);
  throw Error(ErrorCode::kParse, source + ": row " + std::to_string(rows[row].line) +
          ", column '" + column + "': " + msg);
}

CsvTable parse_csv(std::string_view text, std::string source, std::string_view header)
{
  CsvTable table;
  table.source = std::move(source);
  int line_no = 0;
  bool have_header = false;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    if (line.front() == '#') {
      table.comments.emplace_back(trim(line.substr(1)));
      continue;
    }
    if (!have_header) {
      if (line != header) {
        throw Error(ErrorCode::kParse, table.source + ": row " + std::to_string(line_no) +
                ": expected header '" + std::string(header) + "', got '" + std::string(line) + "'");
      }
      for (auto h : split(line, ',')) {
        table.header.emplace_back(h);
      }
      have_header = true;
      continue;
    }
    CsvTable::Row row{line_no, {}};
    for (auto c : split(line, ',')) {
      row.cells.emplace_back(c);
    }
    if (row.cells.size() != table.header.size()) {
      throw Error(ErrorCode::kParse, table.source + ": row " + std::to_string(line_no) + ": expected " +
              std::to_string(table.header.size()) + " columns, got " + std::to_string(row.cells.size()));
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) {
    throw Error(ErrorCode::kParse, table.source + ": missing header '" + std::string(header) + "'");
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path & path, std::string_view header)
{
  return parse_csv(read_file(path), path.string(), header);
}

std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path & path, std::string_view content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write " + path.string());
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw Error(ErrorCode::kIo, "write failed for " + path.string());
  }
}

std::string format_imu_csv(std::span<const ImuSample> samples)
{
  std::string out(kImuHeader);
  out += '\n';
  for (const auto & s : samples) {
    put(out, s.t, 6);
    for (int i = 0; i < 3; ++i) {
      out += ',';
      put(out, s.accel(i), 9);
    }
    for (int i = 0; i < 3; ++i) {
      out += ',';
      put(out, s.gyro(i), 9);
    }
    out += '\n';
  }
  return out;
}

std::vector<ImuSample> parse_imu_csv(const CsvTable & table)
{
  std::vector<ImuSample> out;
  std::vector<double> times;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    ImuSample s;
    s.t = table.number(r, 0);
    s.accel = Vec3(table.number(r, 1), table.number(r, 2), table.number(r, 3));
    s.gyro = Vec3(table.number(r, 4), table.number(r, 5), table.number(r, 6));
    out.push_back(s);
    times.push_back(s.t);
  }
  check_sorted(table, times);
  return out;
}

std::vector<ImuSample> read_imu_csv(const std::filesystem::path & path)
{
  return parse_imu_csv(read_csv(path, kImuHeader));
}

std::string format_gps_csv(const std::optional<GpsFix> & anchor, std::span<const GpsFix> fixes)
{
  std::string out;
  if (anchor) {
    out += "# anchor,";
    put(out, anchor->lat, 10);
    out += ',';
    put(out, anchor->lon, 10);
    out += ',';
    put(out, anchor->alt, 6);
    out += '\n';
  }
  out += kGpsHeader;
  out += '\n';
  for (const auto & f : fixes) {
    put(out, f.t, 6);
    out += ',';
    put(out, f.lat, 10);
    out += ',';
    put(out, f.lon, 10);
    out += ',';
    put(out, f.alt, 6);
    out += '\n';
  }
  return out;
}

GpsLog read_gps_csv(const std::filesystem::path & path)
{
  const CsvTable table = read_csv(path, kGpsHeader);
  GpsLog log;
  for (const auto & c : table.comments) {
    if (c.rfind("anchor,", 0) != 0) {
      continue;
    }
    auto v = to_numbers(std::string_view(c).substr(7));
    if (!v || v->size() != 3) {
      throw Error(ErrorCode::kParse, table.source + ": malformed anchor line '# " + c + "'");
    }
    log.anchor = GpsFix{0.0, (*v)[0], (*v)[1], (*v)[2]};
  }
  std::vector<double> times;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    GpsFix f{table.number(r, 0), table.number(r, 1), table.number(r, 2), table.number(r, 3)};
    if (f.lat < -90.0 || f.lat > 90.0) {
      table.fail(r, 1, "latitude out of range");
    }
    if (f.lon < -180.0 || f.lon > 180.0) {
      table.fail(r, 2, "longitude out of range");
    }
    log.fixes.push_back(f);
    times.push_back(f.t);
  }
  check_sorted(table, times);
  return log;
}

std::string format_sonar_csv(std::span<const SonarPing> pings)
{
  std::string out(kSonarHeader);
  out += '\n';
  for (const auto & p : pings) {
    put(out, p.t, 6);
    out += ',';
    out += to_string(p.channel);
    out += ',';
    put(out, p.range, 6);
    out += p.valid ? ",1\n" : ",0\n";
  }
  return out;
}

std::vector<SonarPing> read_sonar_csv(const std::filesystem::path & path)
{
  const CsvTable table = read_csv(path, kSonarHeader);
  std::vector<SonarPing> out;
  std::vector<double> times;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    SonarPing p;
    p.t = table.number(r, 0);
    try {
      p.channel = parse_channel(table.rows[r].cells[1]);
    } catch (const Error & e) {
      table.fail(r, 1, e.what());
    }
    p.range = table.number(r, 2);
    const auto & v = table.rows[r].cells[3];
    if (v != "0" && v != "1") {
      table.fail(r, 3, "expected 0 or 1");
    }
    p.valid = v == "1";
    if (p.valid && !(p.range > 0.0)) {
      table.fail(r, 2, "valid ping needs a positive range");
    }
    out.push_back(p);
    times.push_back(p.t);
  }
  check_sorted(table, times);
  return out;
}

std::string format_nav_csv(std::span<const NavRecord> records)
{
  std::string out(kNavHeader);
  out += '\n';
  for (const auto & r : records) {
    put(out, r.t, 6);
    for (int i = 0; i < 3; ++i) {
      out += ',';
      put(out, r.p(i), 6);
    }
    for (int i = 0; i < 3; ++i) {
      out += ',';
      put(out, r.v(i), 6);
    }
    for (double c : {r.q.w(), r.q.x(), r.q.y(), r.q.z()}) {
      out += ',';
      put(out, c, 12);
    }
    out += '\n';
  }
  return out;
}

std::vector<NavRecord> read_nav_csv(const std::filesystem::path & path)
{
  const CsvTable table = read_csv(path, kNavHeader);
  std::vector<NavRecord> out;
  std::vector<double> times;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    NavRecord rec;
    rec.t = table.number(r, 0);
    rec.p = Vec3(table.number(r, 1), table.number(r, 2), table.number(r, 3));
    rec.v = Vec3(table.number(r, 4), table.number(r, 5), table.number(r, 6));
    try {
      rec.q = quat_normalize(table.number(r, 7), table.number(r, 8), table.number(r, 9),
          table.number(r, 10));
    } catch (const Error & e) {
      table.fail(r, 7, e.what());
    }
    out.push_back(rec);
    times.push_back(rec.t);
  }
  check_sorted(table, times);
  return out;
}

std::vector<NavRecord> to_records(const sim::GroundTruth & truth)
{
  std::vector<NavRecord> out;
  out.reserve(truth.samples.size());
  for (const auto & s : truth.samples) {
    out.push_back({s.t, s.p, s.v, s.q});
  }
  return out;
}

std::vector<NavRecord> to_records(const loc::LocalizerRun & run)
{
  std::vector<NavRecord> out;
  out.reserve(run.records.size());
  for (const auto & r : run.records) {
    out.push_back({r.t, r.p, r.v, r.q});
  }
  return out;
}

std::string format_offsets(const loc::CalibrationResult & result)
{
  std::string out = "# IMU offsets, subtract from raw readings\n";
  auto vec = [&](const char * key, const Vec3 & v) {
      out += key;
      out += " = ";
      for (int i = 0; i < 3; ++i) {
        if (i) {out += ' ';}
        put(out, v(i), 9);
      }
      out += '\n';
    };
  vec("accel_offset", result.offsets.accel_offset);
  vec("gyro_offset", result.offsets.gyro_offset);
  out += "iterations = " + std::to_string(result.iterations) + '\n';
  out += "batches = " + std::to_string(result.batches) + '\n';
  return out;
}

loc::CalibrationOffsets read_offsets(const std::filesystem::path & path)
{
  const auto cfg = ConfigFile::load(path);
  loc::CalibrationOffsets out;
  bool have_accel = false;
  bool have_gyro = false;
  for (const auto & e : cfg.entries()) {
    if (e.key == "accel_offset") {
      const auto v = cfg.numbers(e, 3);
      out.accel_offset = Vec3(v[0], v[1], v[2]);
      have_accel = true;
    } else if (e.key == "gyro_offset") {
      const auto v = cfg.numbers(e, 3);
      out.gyro_offset = Vec3(v[0], v[1], v[2]);
      have_gyro = true;
    } else if (e.key != "iterations" && e.key != "batches") {
      cfg.fail(e, "unknown key");
    }
  }
  if (!have_accel || !have_gyro) {
    throw Error(ErrorCode::kParse, path.string() + ": needs accel_offset and gyro_offset");
  }
  return out;
}

}  // namespace wearnav::io
