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

// Command-line front end. Talks to the library only through the C API.

#include "wearnav/wearnav.h"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

namespace
{

int finish(wn_status status, char * summary)
{
  if (summary) {
    std::fputs(summary, stdout);
    wn_text_free(summary);
  }
  if (status != WN_OK) {
    std::fprintf(stderr, "wearnav: %s: %s\n", wn_status_string(status), wn_last_error());
  }
  return wn_status_exit_code(status);
}

struct Common
{
  std::string scenario;
  std::string out = ".";
  std::string mode;
  std::string gps;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

void add_common(CLI::App * cmd, Common & c, bool scenario_required)
{
  auto * opt = cmd->add_option("--scenario", c.scenario, "Scenario file (key = value)");
  if (scenario_required) {
    opt->required();
  }
  opt->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_option("--mode", c.mode, "IMU data path")->check(CLI::IsMember({"raw", "dmp"}));
  cmd->add_option("--gps", c.gps, "Use GPS")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--seed", c.seed, "Override the scenario seed");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv"}))
  ->capture_default_str();
}

wn_run_options run_options(const Common & c)
{
  wn_run_options o;
  wn_run_options_default(&o);
  o.scenario = c.scenario.c_str();
  o.out_dir = c.out.c_str();
  o.mode = c.mode.empty() ? -1 : (c.mode == "dmp" ? 1 : 0);
  o.gps = c.gps.empty() ? -1 : (c.gps == "on" ? 1 : 0);
  if (c.seed) {
    o.has_seed = 1;
    o.seed = *c.seed;
  }
  return o;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"wearnav: wearable navigation aid pipeline"};
  app.set_version_flag("--version", wn_version());
  app.require_subcommand(1);

  Common sim;
  auto * simulate = app.add_subcommand("simulate", "Write imu.csv, gps.csv, sonar.csv, truth.csv");
  add_common(simulate, sim, true);

  Common run;
  auto * run_cmd = app.add_subcommand("run", "Simulate, calibrate, fuse, localize, detect, evaluate");
  add_common(run_cmd, run, true);

  Common loc;
  std::string imu_path, gps_path, offsets_path;
  auto * localize = app.add_subcommand("localize", "ES-EKF over imu.csv and gps.csv into est.csv");
  add_common(localize, loc, false);
  localize->add_option("--imu", imu_path, "IMU CSV")->required()->check(CLI::ExistingFile);
  localize->add_option("--gps-csv", gps_path, "GPS CSV")->required()->check(CLI::ExistingFile);
  localize->add_option("--offsets", offsets_path, "offsets.cfg from calibrate")
  ->check(CLI::ExistingFile);

  Common eval;
  std::string est_path, truth_path;
  auto * evaluate = app.add_subcommand("evaluate", "Error report of est.csv against truth.csv");
  add_common(evaluate, eval, false);
  evaluate->add_option("--est", est_path, "Estimate CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", truth_path, "Truth CSV")->required()->check(CLI::ExistingFile);

  Common fuse;
  std::string sonar_path;
  auto * fuse_sonar = app.add_subcommand("fuse-sonar", "Two-sensor front fusion into fused.csv");
  add_common(fuse_sonar, fuse, false);
  fuse_sonar->add_option("--sonar", sonar_path, "Sonar CSV")->required()->check(CLI::ExistingFile);

  Common cal;
  std::string calib_path;
  int batch = 1000;
  double tol = 1e-3;
  int max_iter = 20;
  auto * calibrate = app.add_subcommand("calibrate", "IMU offsets from a stationary recording");
  add_common(calibrate, cal, false);
  calibrate->add_option("--imu", calib_path, "Stationary IMU CSV")->required()
  ->check(CLI::ExistingFile);
  calibrate->add_option("--batch", batch, "Readings per iteration")->capture_default_str()
  ->check(CLI::PositiveNumber);
  calibrate->add_option("--tol", tol, "Convergence tolerance")->capture_default_str()
  ->check(CLI::PositiveNumber);
  calibrate->add_option("--max-iter", max_iter, "Iteration limit")->capture_default_str()
  ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return 1;
  }

  char * summary = nullptr;
  if (simulate->parsed()) {
    const auto o = run_options(sim);
    const wn_status status = wn_cmd_simulate(&o, &summary);
    return finish(status, summary);
  }
  if (run_cmd->parsed()) {
    const auto o = run_options(run);
    const wn_status status = wn_cmd_run(&o, &summary);
    return finish(status, summary);
  }
  if (localize->parsed()) {
    const std::string out = loc.out + "/est.csv";
    const int mode = loc.mode.empty() ? -1 : (loc.mode == "dmp" ? 1 : 0);
    const wn_status status = wn_cmd_localize(imu_path.c_str(), gps_path.c_str(),
        loc.scenario.empty() ? nullptr : loc.scenario.c_str(),
        offsets_path.empty() ? nullptr : offsets_path.c_str(), mode, out.c_str(), &summary);
    return finish(status, summary);
  }
  if (evaluate->parsed()) {
    const wn_status status =
      wn_cmd_evaluate(est_path.c_str(), truth_path.c_str(), eval.out.c_str(), &summary);
    return finish(status, summary);
  }
  if (fuse_sonar->parsed()) {
    const wn_status status = wn_cmd_fuse_sonar(sonar_path.c_str(), fuse.out.c_str(), &summary);
    return finish(status, summary);
  }
  if (calibrate->parsed()) {
    const wn_status status =
      wn_cmd_calibrate(calib_path.c_str(), cal.out.c_str(), batch, tol, max_iter, &summary);
    return finish(status, summary);
  }
  return 1;
}
